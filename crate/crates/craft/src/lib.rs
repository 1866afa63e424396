//! Text frontend for scenes given as event descriptions, and a completion
//! service used in place of a physics simulator.

pub mod description;
pub mod pipeline;
pub mod prompt;
pub mod proxy;
pub mod question;

pub use description::{parse_description, DescriptionError, BASKET_ID, GROUND_ID};
pub use pipeline::{CraftAnswer, CraftCase, CraftError, CraftSetting};
pub use prompt::{build_prompt, PromptVariant};
pub use proxy::{proxy_simulate, Completion, CompletionCache, CompletionError, ServiceClient, ServiceConfig};
pub use question::{parse_question, CraftQuestion, Outcome, QuestionForm};
