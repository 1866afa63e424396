//! Prompt text for the completion service.

use thiserror::Error;

use crate::question::CraftQuestion;

pub const COUNTERFACTUAL_INSTRUCTION: &str = "A description of a scene of moving objects and their physical dynamics is presented. A question is then asked about hypothetical changes in the scene and their outcomes.";
pub const PERCEPTION_INSTRUCTION: &str = "A description of a scene of moving objects and their physical dynamics is presented. A question is then asked about the scene description.";

const YES_NO: &str = "(yes or no)";
const NUMBER: &str = "(answer with a number)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PromptVariant {
    /// The counterfactual question as asked.
    CounterfactualBaseline,
    /// The question restated about the described scene; only valid once the
    /// answer is known to carry over from perception.
    PerceptionRephrased,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("a rephrased prompt needs a determined answer")]
pub struct InvalidVariant;

/// Renders a prompt. `determined` says whether the causal graph fixed the
/// answer, which the rephrased variant requires.
pub fn build_prompt(
    variant: PromptVariant,
    description: &str,
    question: &CraftQuestion,
    determined: bool,
) -> Result<String, InvalidVariant> {
    let suffix = if question.is_counting() { NUMBER } else { YES_NO };
    let (instruction, asked) = match variant {
        PromptVariant::CounterfactualBaseline => (COUNTERFACTUAL_INSTRUCTION, question.text.clone()),
        PromptVariant::PerceptionRephrased if determined => {
            let rephrased = question.perception_question();
            let mut chars = rephrased.chars();
            let first = chars.next().map(|c| c.to_ascii_lowercase()).into_iter();
            let lowered: String = first.chain(chars).collect();
            (PERCEPTION_INSTRUCTION, format!("According to the scene description, {lowered}"))
        }
        PromptVariant::PerceptionRephrased => return Err(InvalidVariant),
    };
    Ok(format!(
        "Instructions: {instruction}\n\nDescription: {}\n\n{asked} {suffix}\n",
        description.trim()
    ))
}
