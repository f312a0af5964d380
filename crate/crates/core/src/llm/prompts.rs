//! Prompt construction for the two chat protocols.
//!
//! Prompts are written in English (cheaper per token); the determination
//! stage asks for a German reply. Every prompt carries a stable `Task:`
//! tag line and fielded-answer instructions so responses stay machine
//! parseable.

use crate::corpus::{Article, CompanySpec};

pub const TAG_FILTER_INITIAL: &str = "Task: initial-relevance";
pub const TAG_FILTER_EXPLAIN: &str = "Task: explain-and-summarize";
pub const TAG_FILTER_DIRECT: &str = "Task: direct-esg";
pub const TAG_FILTER_FINAL: &str = "Task: final-relevance";
pub const TAG_DETERMINE: &str = "Task: determination";
pub const TAG_TRANSLATE: &str = "Task: translate-summary";

pub const ARTICLE_BEGIN: &str = "--- ARTICLE ---";
pub const ARTICLE_END: &str = "--- END ARTICLE ---";
pub const TEXT_BEGIN: &str = "--- TEXT ---";
pub const TEXT_END: &str = "--- END TEXT ---";

pub fn system_prompt() -> String {
    "You are an analyst for corporate sustainability (ESG) news. \
     Follow the task instructions exactly and answer only with the requested fields."
        .to_string()
}

fn article_block(article: &Article) -> String {
    let mut s = String::new();
    s.push_str(ARTICLE_BEGIN);
    s.push('\n');
    s.push_str(&format!("Title: {}\n", article.title));
    for p in &article.paragraphs {
        s.push_str(p);
        s.push('\n');
    }
    s.push_str(ARTICLE_END);
    s
}

fn company_clause(company: &CompanySpec) -> String {
    if company.related_company_ids.is_empty() {
        format!("The target company is {}.", company.display_name)
    } else {
        format!(
            "The target company is {}. Related companies that must not be confused with it: {}.",
            company.display_name,
            company.related_company_ids.join(", ")
        )
    }
}

/// Turn 1 of the filter protocol: first relevancy guess.
pub fn filter_initial(article: &Article, company: &CompanySpec) -> String {
    format!(
        "{TAG_FILTER_INITIAL}\n{}\n\n{}\n\nIs this article relevant to the target company \
         in the context of ESG (environmental, social, governance) topics?\n\
         Answer with exactly one line: `Relevant: yes` or `Relevant: no`.",
        company_clause(company),
        article_block(article),
    )
}

/// Turn 2: explanation plus summary used by later stages.
pub fn filter_explain() -> String {
    format!(
        "{TAG_FILTER_EXPLAIN}\nExplain your relevancy answer and summarize the article with \
         respect to ESG topics about the target company.\n\
         Answer with the fields:\nExplanation: <one short paragraph>\nSummary: <one short paragraph>"
    )
}

/// Turn 3: does the article address ESG directly, not via loosely related
/// effects?
pub fn filter_direct() -> String {
    format!(
        "{TAG_FILTER_DIRECT}\nAre ESG issues being directly addressed in the article itself, \
         rather than inferred from loosely related topics such as stock price movements?\n\
         Answer with exactly one line: `DirectESG: yes` or `DirectESG: no`."
    )
}

/// Turn 4: final relevancy, referring the model to its own earlier answers.
pub fn filter_final() -> String {
    format!(
        "{TAG_FILTER_FINAL}\nConsidering your explanation, your summary and your answer on \
         whether ESG issues are directly addressed, determine the relevancy again.\n\
         Answer with exactly one line: `FinalRelevant: yes` or `FinalRelevant: no`."
    )
}

/// The single-turn determination prompt. English prompt, German answer.
pub fn determination(article: &Article, company: &CompanySpec) -> String {
    format!(
        "{TAG_DETERMINE}\n{}\n\n{}\n\nSummarize the article regarding ESG topics about the \
         target company and determine whether it is relevant. If it is relevant, also give \
         the ESG sentiment (the sentiment of the ESG information for the target company, \
         not the overall tone), the ESG aspect, a relevance score from 1 to 10, and a list \
         of keywords.\n\
         Reply in German. Answer with the fields:\n\
         Summary: <Zusammenfassung auf Deutsch>\n\
         Relevant: <ja|nein>\n\
         Sentiment: <positiv|neutral|negativ>   (only if relevant)\n\
         Aspekt: <E|S|G>   (only if relevant)\n\
         Score: <1-10>   (only if relevant)\n\
         Keywords: <comma separated>   (only if relevant)",
        company_clause(company),
        article_block(article),
    )
}

/// Translation request for a stored German summary.
pub fn translate(summary_de: &str) -> String {
    format!(
        "{TAG_TRANSLATE}\nTranslate the following German summary into English. \
         Reply with the translation only.\n{TEXT_BEGIN}\n{summary_de}\n{TEXT_END}"
    )
}

/// Reminder appended when a response could not be parsed.
pub fn format_reminder(expected_fields: &[&str]) -> String {
    format!(
        "Your previous answer could not be parsed. Answer again using exactly the fields: {}. \
         One field per line, `Field: value`.",
        expected_fields.join(", ")
    )
}
