//! Answering a description and question in one of three settings: the
//! completion service alone, graph determinations overriding it, or graph
//! determinations turning the question into a perception question.

use crcg_core::graph::{determine, DerivedRelations};
use crcg_core::model::{Answer, Determination, ModelError, ResolvedQuery, ResolvedVariant, Scene};
use crcg_core::orchestrator::answer_counting;
use serde::Serialize;
use thiserror::Error;

use crate::description::{parse_description, DescriptionError};
use crate::prompt::{build_prompt, InvalidVariant, PromptVariant};
use crate::proxy::{parse_count, parse_yes_no, Completion, CompletionError};
use crate::question::{parse_question, CraftQuestion, UnsupportedQuestion};

#[derive(Debug, Error)]
pub enum CraftError {
    #[error(transparent)]
    Description(#[from] DescriptionError),
    #[error(transparent)]
    Question(#[from] UnsupportedQuestion),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Prompt(#[from] InvalidVariant),
    #[error(transparent)]
    Completion(#[from] CompletionError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CraftSetting {
    Baseline,
    Approx,
    Guided,
}

/// A parsed description and question with the graph's verdict.
#[derive(Debug, Clone)]
pub struct CraftCase {
    pub description: String,
    pub scene: Scene,
    pub question: CraftQuestion,
    pub resolved: ResolvedQuery,
    /// Answer fixed by the causal graph, if any.
    pub known: Option<Answer>,
}

impl CraftCase {
    pub fn new(description: &str, question: &str) -> Result<Self, CraftError> {
        let scene = parse_description(description)?;
        let question = parse_question(question)?;
        let resolved = question.query().resolve(&scene.objects)?;
        let events = scene.normalized_events()?;
        let derived = DerivedRelations::for_query(&scene.objects, &events, &resolved);
        let known = match resolved.variant {
            ResolvedVariant::Counting { kind, target } => {
                Some(answer_counting(&events, kind, target, &resolved.removed, &derived.sim))
                    .filter(|a| *a != Answer::Undetermined)
            }
            _ => match determine(&resolved, &events, &derived) {
                Determination::Yes => Some(Answer::Yes),
                Determination::No => Some(Answer::No),
                Determination::Undetermined => None,
            },
        };
        Ok(Self {
            description: description.trim().to_string(),
            scene,
            question,
            resolved,
            known,
        })
    }

    /// Prompt the setting would send, or `None` when it answers without the
    /// service.
    pub fn prompt(&self, setting: CraftSetting) -> Result<Option<String>, CraftError> {
        let variant = match (setting, self.known.is_some()) {
            (CraftSetting::Approx, true) => return Ok(None),
            (CraftSetting::Guided, true) => PromptVariant::PerceptionRephrased,
            _ => PromptVariant::CounterfactualBaseline,
        };
        Ok(Some(build_prompt(variant, &self.description, &self.question, self.known.is_some())?))
    }

    pub fn answer(&self, setting: CraftSetting, client: &dyn Completion) -> Result<CraftAnswer, CraftError> {
        let prompt = self.prompt(setting)?;
        let answer = match &prompt {
            None => self.known.expect("no prompt only when the answer is known"),
            Some(p) => {
                let completion = client.complete(p)?;
                if self.question.is_counting() {
                    Answer::Count(parse_count(&completion)?)
                } else {
                    parse_yes_no(&completion)?.into()
                }
            }
        };
        Ok(CraftAnswer {
            setting,
            answer,
            determined: self.known.is_some(),
            prompt,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CraftAnswer {
    pub setting: CraftSetting,
    pub answer: Answer,
    pub determined: bool,
    pub prompt: Option<String>,
}
