//! The two chat protocols: the cheap multi-turn relevance filter and the
//! single-turn final determination, plus optional summary translation.
//!
//! Responses are parsed strictly; a malformed answer triggers up to
//! [`REPROMPT_BUDGET`] format reminders before the article is quarantined.

pub mod parse;
pub mod prompts;

use serde::{Deserialize, Serialize};

use crate::corpus::{Article, CompanySpec};
use crate::error::{Error, Result};
use crate::providers::{ChatMessage, ChatProvider};
use crate::types::{Aspect, Sentiment};

use parse::Field;

/// Format reminders allowed before giving up on an article.
pub const REPROMPT_BUDGET: u32 = 2;

/// Outcome of the four-turn filter protocol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterVerdict {
    pub initial_relevant: bool,
    pub explanation: String,
    pub summary: String,
    pub direct_esg: bool,
    pub final_relevant: bool,
}

impl FilterVerdict {
    /// Pass-through condition: the article must be judged relevant AND
    /// directly address ESG issues.
    pub fn passes(&self) -> bool {
        self.final_relevant && self.direct_esg
    }
}

/// Final verdict of the determination stage. Sentiment, aspect and score
/// are present exactly when the article is relevant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Determination {
    pub summary: String,
    pub relevant: bool,
    pub sentiment: Option<Sentiment>,
    pub aspect: Option<Aspect>,
    pub relevance_score: Option<u8>,
    pub keywords: Vec<String>,
    pub summary_en: Option<String>,
}

/// Terminal record for an article whose responses stayed unusable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuarantineRecord {
    pub article_id: String,
    pub stage: String,
    pub attempts: u32,
    pub last_error: String,
    pub raw_response: String,
}

/// Failure detail for a protocol run, convertible into a
/// [`QuarantineRecord`] by the pipeline.
#[derive(Debug, Clone)]
pub struct LlmFailure {
    pub attempts: u32,
    pub last_error: String,
    pub raw_response: String,
}

impl LlmFailure {
    pub fn into_quarantine(self, article_id: &str, stage: &str) -> QuarantineRecord {
        QuarantineRecord {
            article_id: article_id.to_string(),
            stage: stage.to_string(),
            attempts: self.attempts,
            last_error: self.last_error,
            raw_response: self.raw_response,
        }
    }
}

fn transport_failure(e: Error) -> LlmFailure {
    LlmFailure {
        attempts: 1,
        last_error: e.to_string(),
        raw_response: String::new(),
    }
}

/// One protocol turn: send, parse, re-prompt on parse failure. On success
/// the assistant answer is appended to `messages` so later turns can refer
/// back to it.
fn turn(
    provider: &dyn ChatProvider,
    messages: &mut Vec<ChatMessage>,
    prompt: String,
    required: &[Field],
) -> Result<parse::ParsedFields, LlmFailure> {
    messages.push(ChatMessage::user(prompt));
    let mut attempts = 0;
    loop {
        attempts += 1;
        let exchange = provider.chat(messages).map_err(transport_failure)?;
        match parse::parse_structured_response(&exchange.response, required) {
            Ok(parsed) => {
                messages.push(ChatMessage::assistant(exchange.response));
                return Ok(parsed);
            }
            Err(e) => {
                if attempts > REPROMPT_BUDGET {
                    return Err(LlmFailure {
                        attempts,
                        last_error: e.to_string(),
                        raw_response: exchange.response,
                    });
                }
                messages.push(ChatMessage::assistant(exchange.response));
                let names: Vec<&str> = required.iter().map(|f| f.name()).collect();
                messages.push(ChatMessage::user(prompts::format_reminder(&names)));
                let exchange2 = provider.chat(messages).map_err(transport_failure)?;
                // Replace reminder round with the (hopefully fixed) answer.
                messages.pop();
                messages.pop();
                match parse::parse_structured_response(&exchange2.response, required) {
                    Ok(parsed) => {
                        messages.push(ChatMessage::assistant(exchange2.response));
                        return Ok(parsed);
                    }
                    Err(e2) => {
                        if attempts + 1 > REPROMPT_BUDGET {
                            return Err(LlmFailure {
                                attempts: attempts + 1,
                                last_error: e2.to_string(),
                                raw_response: exchange2.response,
                            });
                        }
                        attempts += 1;
                    }
                }
            }
        }
    }
}

/// Run the four-turn relevance filter: initial relevancy, explanation and
/// summary, direct-ESG check, then the final relevancy with the model's own
/// prior answers in context.
pub fn run_filter_stage(
    article: &Article,
    company: &CompanySpec,
    provider: &dyn ChatProvider,
) -> Result<FilterVerdict, LlmFailure> {
    let mut messages = vec![ChatMessage::system(prompts::system_prompt())];

    let initial = turn(
        provider,
        &mut messages,
        prompts::filter_initial(article, company),
        &[Field::Relevant],
    )?;
    let initial_relevant =
        parse::parse_bool(initial.require(Field::Relevant).map_err(parse_failure)?)
            .map_err(parse_failure)?;

    let explain = turn(
        provider,
        &mut messages,
        prompts::filter_explain(),
        &[Field::Explanation, Field::Summary],
    )?;
    let explanation = explain.require(Field::Explanation).map_err(parse_failure)?.to_string();
    let summary = explain.require(Field::Summary).map_err(parse_failure)?.to_string();

    let direct = turn(provider, &mut messages, prompts::filter_direct(), &[Field::DirectEsg])?;
    let direct_esg = parse::parse_bool(direct.require(Field::DirectEsg).map_err(parse_failure)?)
        .map_err(parse_failure)?;

    let fin = turn(provider, &mut messages, prompts::filter_final(), &[Field::FinalRelevant])?;
    let final_relevant =
        parse::parse_bool(fin.require(Field::FinalRelevant).map_err(parse_failure)?)
            .map_err(parse_failure)?;

    Ok(FilterVerdict {
        initial_relevant,
        explanation,
        summary,
        direct_esg,
        final_relevant,
    })
}

fn parse_failure(e: Error) -> LlmFailure {
    LlmFailure { attempts: 1, last_error: e.to_string(), raw_response: String::new() }
}

/// Run the single-turn determination protocol.
pub fn run_determination(
    article: &Article,
    company: &CompanySpec,
    provider: &dyn ChatProvider,
) -> Result<Determination, LlmFailure> {
    let mut messages = vec![ChatMessage::system(prompts::system_prompt())];
    let mut attempts = 0;
    let prompt = prompts::determination(article, company);
    messages.push(ChatMessage::user(prompt));

    loop {
        attempts += 1;
        let exchange = provider.chat(&messages).map_err(transport_failure)?;
        match parse_determination(&exchange.response) {
            Ok(det) => return Ok(det),
            Err(e) => {
                if attempts > REPROMPT_BUDGET {
                    return Err(LlmFailure {
                        attempts,
                        last_error: e.to_string(),
                        raw_response: exchange.response,
                    });
                }
                messages.push(ChatMessage::assistant(exchange.response));
                messages.push(ChatMessage::user(prompts::format_reminder(&[
                    "Summary", "Relevant", "Sentiment", "Aspekt", "Score", "Keywords",
                ])));
            }
        }
    }
}

/// Parse a determination response into its typed form, enforcing the
/// relevant ⇒ (sentiment, aspect, score) invariant.
pub fn parse_determination(raw: &str) -> Result<Determination> {
    let parsed = parse::parse_structured_response(raw, &[Field::Summary, Field::Relevant])?;
    let relevant = parse::parse_bool(parsed.require(Field::Relevant)?)?;
    let summary = parsed.require(Field::Summary)?.to_string();
    if !relevant {
        return Ok(Determination {
            summary,
            relevant: false,
            sentiment: None,
            aspect: None,
            relevance_score: None,
            keywords: Vec::new(),
            summary_en: None,
        });
    }
    let sentiment = parse::parse_sentiment(parsed.require(Field::Sentiment)?)?;
    let aspect = parse::parse_aspect(parsed.require(Field::Aspect)?)?;
    let score = parse::parse_score(parsed.require(Field::Score)?)?;
    let keywords = parse::parse_keywords(parsed.get(Field::Keywords).unwrap_or(""));
    Ok(Determination {
        summary,
        relevant: true,
        sentiment: Some(sentiment),
        aspect: Some(aspect),
        relevance_score: Some(score),
        keywords,
        summary_en: None,
    })
}

/// Translate a stored German summary into English. Failure is non-fatal for
/// the pipeline (the field is simply left absent); an empty input is a
/// precondition error.
pub fn translate_summary(summary_de: &str, provider: &dyn ChatProvider) -> Result<String> {
    if summary_de.trim().is_empty() {
        return Err(Error::validation("cannot translate an empty summary"));
    }
    let messages = vec![
        ChatMessage::system(prompts::system_prompt()),
        ChatMessage::user(prompts::translate(summary_de)),
    ];
    let exchange = provider.chat(&messages)?;
    if exchange.response.trim().is_empty() {
        return Err(Error::provider(provider.id(), "empty translation"));
    }
    Ok(exchange.response.trim().to_string())
}
