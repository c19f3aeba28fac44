// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Compiles ZX diagrams into deterministically runnable Pauli Fusion
//! procedures.

pub mod compile;
pub mod error;
pub mod flow;
pub mod graphlike;
pub mod pf;
pub mod phase;
pub mod semantics;
pub mod testing;
pub mod zx;

pub use error::{Error, Result};
pub use phase::Phase;
pub use zx::{NodeKind, ZXDiagram};
