//! LLM-driven autoformalization: prompting, syntactic repair and sampling.

mod prompts;
mod run;
mod transport;

pub use prompts::{
    build_propose_prompt, build_revise_prompt, default_repair_examples, extract_formula, system_prompt, FailedProposal,
    RepairExample,
};
pub use run::{
    best_index, run_attempt, run_benchmark, Attempt, AttemptVerdict, Exchange, PipelineConfig, PromptMode, Proposal,
    RunRecord,
};
pub use transport::{
    request_hash, HttpTransport, LlmTransport, Message, Params, RecordingTransport, ReplayEntry, ReplayTransport, Role,
    TransportError, API_KEY_ENV, BASE_URL_ENV, DEFAULT_BASE_URL,
};
