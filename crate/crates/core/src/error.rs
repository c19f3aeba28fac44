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

//! Error type shared by every stage of the compiler.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {context}: {message}")]
    Parse { context: String, message: String },

    #[error("invalid phase {num}/{den}: {reason}")]
    InvalidPhase { num: i64, den: i64, reason: &'static str },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("diagram evaluates to the zero map")]
    ZeroDiagram,

    #[error("normalization exceeded its step budget of {0} sweeps")]
    NormalizationBudget(usize),

    #[error("bit `{0}` has no assigned value")]
    MissingBit(String),

    #[error("contraction frontier of {width} wires exceeds the cap of {cap}")]
    WidthExceeded { width: usize, cap: usize },

    #[error("signature has {size} vertices, exhaustive search is limited to {limit}")]
    SizeExceeded { size: usize, limit: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("flow is not valid for this diagram: {0}")]
    FlowInvalid(String),

    #[error("internal arity error at node `{0}`")]
    InternalArity(String),

    #[error("diagram is not runnable: {0}")]
    NotRunnable(String),

    #[error("state collapsed to zero norm at `{0}`")]
    NormCollapse(String),

    #[error("reference map is zero")]
    ZeroReference,

    #[error("invalid kraus request: {0}")]
    InvalidKraus(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}
