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

//! Dense semantics: ZX evaluation, the Kraus library, determinism checks
//! and the operational simulator.

mod dense;
mod eval;
mod kraus;
mod sim;
mod verify;

pub use dense::{proportional, DenseMap};
pub use eval::{eval_zx, eval_zx_with, ContractionPlan, EvalConfig, DEFAULT_WIDTH_CAP};
pub use kraus::{kraus, library, KrausOp};
pub use verify::{
    check_determinism, BranchResult, VerificationReport, VerifyConfig, DEFAULT_BRANCH_CAP,
    DEFAULT_TOLERANCE, SAMPLED_BRANCHES,
};
pub use sim::{apply_channel, branch_operator, run_procedure, RunResult, CHANNEL_MAX_BITS, COLLAPSE_THRESHOLD};
