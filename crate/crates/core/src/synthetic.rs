//! Deterministic synthetic data: a marker-driven mock corpus for pipeline
//! runs and a fixed-marginals reference dataset for the analysis suite.
//!
//! The reference dataset is a desk-scale stand-in for a full production
//! export: 41 companies, 51,087 records, with company sizes, sentiment and
//! aspect totals, per-company macro ratios, the relevance-score histogram
//! and per-aspect mean sentiments all pinned to fixed targets. Construction
//! is seeded and asserts its own invariants, so any drift fails loudly.

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Article, CompanySpec, Keyword};
use crate::dataset::DatasetRecord;
use crate::types::{Aspect, Sentiment, ASPECTS, SENTIMENTS};

const REFERENCE_SEED: u64 = 0x5347_4e45;

/// (display name, record count); descending, totalling 51,087.
const COMPANIES: [(&str, u32); 41] = [
    ("Volkswagen", 7233),
    ("Mercedes-Benz", 3504),
    ("Siemens", 3120),
    ("BMW", 2735),
    ("Bayer", 2479),
    ("Deutsche Bank", 2222),
    ("BASF", 2094),
    ("Allianz", 1966),
    ("SAP", 1838),
    ("RWE", 1709),
    ("Deutsche Telekom", 1624),
    ("E.ON", 1538),
    ("Adidas", 1453),
    ("Airbus", 1367),
    ("Continental", 1282),
    ("Deutsche Post", 1197),
    ("Porsche", 1154),
    ("Infineon", 1068),
    ("Rheinmetall", 983),
    ("Siemens Energy", 897),
    ("Commerzbank", 855),
    ("Covestro", 812),
    ("Daimler Truck", 769),
    ("Deutsche Boerse", 726),
    ("Fresenius", 684),
    ("Heidelberg Materials", 641),
    ("Henkel", 598),
    ("Merck", 556),
    ("MTU Aero Engines", 513),
    ("Munich Re", 470),
    ("Beiersdorf", 427),
    ("Brenntag", 385),
    ("Fresenius Medical Care", 359),
    ("Qiagen", 333),
    ("Sartorius", 308),
    ("Siemens Healthineers", 282),
    ("Symrise", 256),
    ("Vonovia", 231),
    ("Zalando", 205),
    ("Porsche SE", 137),
    ("Hannover Re", 77),
];

/// Dataset-wide totals: sentiment (negative, neutral, positive) and aspect
/// (E, S, G).
pub const SENTIMENT_TOTALS: [u64; 3] = [17668, 6115, 27304];
pub const ASPECT_TOTALS: [u64; 3] = [24546, 15086, 11455];

/// Per-company macro-averaged ratio targets at 4 decimal places.
pub const MACRO_SENTIMENT: [f64; 3] = [0.3274, 0.1290, 0.5436];
pub const MACRO_ASPECT: [f64; 3] = [0.3574, 0.3430, 0.2995];

/// Relevance-score histogram for scores 1..=10.
pub const SCORE_HISTOGRAM: [u64; 10] = [0, 2, 122, 983, 1380, 10465, 18219, 17113, 2780, 23];

/// Global sentiment × aspect cross table consistent with the totals above
/// and the per-aspect mean-sentiment targets (0.41, 0.16, −0.25).
const CROSS_TARGET: [[i64; 3]; 3] = [
    [5768, 5430, 6470],
    [2938, 1806, 1371],
    [15840, 7850, 3614],
];

/// Topic vocabulary pools; disjoint token sets so mock embeddings separate
/// cleanly. Grouped by the aspect they plausibly belong to.
const POOLS_E: [&[&str]; 3] = [
    &["emissionen", "co2", "klimaziele", "reduktion", "flottengrenzwerte", "abgaswerte", "klimaschutz", "dekarbonisierung", "treibhausgase", "klimabilanz"],
    &["windkraft", "solaranlagen", "photovoltaik", "oekostrom", "netzausbau", "erneuerbare", "energiewende", "speichertechnik", "wasserstoff", "stromerzeugung"],
    &["wasserverbrauch", "verschmutzung", "umweltschutz", "grenzwerte", "chemikalien", "abwasser", "altlasten", "naturschutz", "renaturierung", "schadstoffe"],
];
const POOLS_S: [&[&str]; 3] = [
    &["streik", "tarifverhandlung", "gewerkschaft", "betriebsrat", "lohnerhoehung", "arbeitsbedingungen", "stellenabbau", "beschaeftigte", "sozialplan", "kurzarbeit"],
    &["diversitaet", "frauenquote", "gleichstellung", "fuehrungspositionen", "inklusion", "chancengleichheit", "elternzeit", "weiterbildung", "mitarbeitende", "unternehmenskultur"],
    &["lieferkettengesetz", "sorgfaltspflicht", "zulieferer", "rohstoffe", "kobalt", "arbeitsschutz", "fabriken", "kontrollen", "standards", "herkunft"],
];
const POOLS_G: [&[&str]; 3] = [
    &["vorstand", "aufsichtsrat", "verguetung", "hauptversammlung", "aktionaere", "neubesetzung", "satzung", "stimmrechte", "governance", "kontrollgremium"],
    &["korruption", "bestechung", "ermittlungen", "razzia", "compliance", "untersuchung", "staatsanwaltschaft", "bussgeld", "aufarbeitung", "hinweisgeber"],
    &["klage", "gericht", "schadenersatz", "urteil", "verfahren", "anleger", "prozess", "berufung", "vergleich", "haftung"],
];

/// Vocabulary of the crafted forced-labor topic in the largest company's
/// subset (social aspect).
pub const FORCED_LABOR_POOL: [&str; 10] = [
    "zwangsarbeit", "xinjiang", "menschenrechte", "werksgelaende", "audit", "pruefbericht",
    "lieferkette", "uiguren", "provinz", "vorwuerfe",
];

struct CountsBuild {
    /// counts[i][d] per company per dimension.
    counts: Vec<[u64; 3]>,
}

/// Distribute per-dimension totals over companies so that (a) the global
/// sums are exact and (b) the unweighted mean of per-company ratios rounds
/// to the 4-decimal macro targets. Share mass is shifted between
/// large/small company pairs (macro-neutral), integer drift is repaired on
/// the largest companies, and a final paired-move pass tunes the macro
/// means to within 4.9e-5.
fn build_counts(totals: [u64; 3], macro_targets: [f64; 3], sizes: &[u32]) -> CountsBuild {
    let n_companies = sizes.len();
    let total_records: u64 = sizes.iter().map(|&s| s as u64).sum();

    let mut shares: Vec<[f64; 3]> = vec![macro_targets; n_companies];
    let pairs: Vec<(usize, usize)> =
        (0..n_companies / 2).map(|k| (k, n_companies - 1 - k)).collect();
    let pair_weight: f64 = pairs
        .iter()
        .map(|&(i, j)| (sizes[i] as f64) - (sizes[j] as f64))
        .sum();
    for d in 0..3 {
        let deficit = totals[d] as f64 - macro_targets[d] * total_records as f64;
        let x = deficit / pair_weight;
        for &(i, j) in &pairs {
            shares[i][d] += x;
            shares[j][d] -= x;
        }
    }
    for (i, share) in shares.iter().enumerate() {
        for d in 0..3 {
            assert!(
                share[d] > 0.005 && share[d] < 0.995,
                "company {i} dimension {d} share {} out of range",
                share[d]
            );
        }
    }

    // Largest-remainder integerization per company.
    let mut counts: Vec<[u64; 3]> = Vec::with_capacity(n_companies);
    for (i, share) in shares.iter().enumerate() {
        let n = sizes[i] as f64;
        let raw = [share[0] * n, share[1] * n, share[2] * n];
        let mut fl = [raw[0].floor() as u64, raw[1].floor() as u64, raw[2].floor() as u64];
        let mut remainder = sizes[i] as i64 - fl.iter().sum::<u64>() as i64;
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            (raw[b] - raw[b].floor()).partial_cmp(&(raw[a] - raw[a].floor())).unwrap()
        });
        for &d in &order {
            if remainder > 0 {
                fl[d] += 1;
                remainder -= 1;
            }
        }
        counts.push(fl);
    }

    // Exact global totals, absorbing drift on the largest companies.
    loop {
        let current: [i64; 3] = {
            let mut c = [0i64; 3];
            for row in &counts {
                for d in 0..3 {
                    c[d] += row[d] as i64;
                }
            }
            c
        };
        let err: Vec<i64> = (0..3).map(|d| totals[d] as i64 - current[d]).collect();
        if err.iter().all(|&e| e == 0) {
            break;
        }
        let over = (0..3).max_by_key(|&d| err[d]).unwrap();
        let under = (0..3).min_by_key(|&d| err[d]).unwrap();
        let donor = (0..n_companies).find(|&i| counts[i][under] > 1).unwrap();
        counts[donor][over] += 1;
        counts[donor][under] -= 1;
    }

    // Macro fine-tune with totals-preserving paired moves: company i moves
    // one record a→b, company j moves one b→a; the macro mean of dimension
    // b shifts by (1/n_i − 1/n_j) / n_companies.
    let macro_means = |counts: &[[u64; 3]]| -> [f64; 3] {
        let mut m = [0.0; 3];
        for (i, row) in counts.iter().enumerate() {
            for d in 0..3 {
                m[d] += row[d] as f64 / sizes[i] as f64;
            }
        }
        for v in &mut m {
            *v /= n_companies as f64;
        }
        m
    };
    let mut step_candidates: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n_companies {
        for j in 0..n_companies {
            if sizes[i] < sizes[j] {
                step_candidates.push((
                    (1.0 / sizes[i] as f64 - 1.0 / sizes[j] as f64) / n_companies as f64,
                    i,
                    j,
                ));
            }
        }
    }
    step_candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Published targets need not sum to exactly 1; tune toward the
    // equal-split residual so every dimension rounds correctly.
    let residual = (1.0 - macro_targets.iter().sum::<f64>()) / 3.0;

    for iteration in 0..50_000 {
        let m = macro_means(&counts);
        let deviation: Vec<f64> = (0..3).map(|d| m[d] - macro_targets[d] - residual).collect();
        if deviation.iter().all(|&e| e.abs() <= 1.2e-5) {
            break;
        }
        assert!(iteration < 49_999, "macro fine-tune failed to converge: {deviation:?}");
        let a = (0..3).max_by(|&x, &y| deviation[x].partial_cmp(&deviation[y]).unwrap()).unwrap();
        let b = (0..3).min_by(|&x, &y| deviation[x].partial_cmp(&deviation[y]).unwrap()).unwrap();
        let need = deviation[a];
        let mut chosen = None;
        for &(step, i, j) in &step_candidates {
            if step > need * 1.02 {
                break;
            }
            if counts[i][a] > 1 && counts[j][b] > 1 {
                chosen = Some((i, j));
            }
        }
        if chosen.is_none() {
            chosen = step_candidates
                .iter()
                .find(|&&(_, i, j)| counts[i][a] > 1 && counts[j][b] > 1)
                .map(|&(_, i, j)| (i, j));
        }
        let (i, j) = chosen.expect("a feasible tuning move always exists");
        counts[i][a] -= 1;
        counts[i][b] += 1;
        counts[j][b] -= 1;
        counts[j][a] += 1;
    }

    let m = macro_means(&counts);
    for d in 0..3 {
        assert!(
            (m[d] - macro_targets[d]).abs() < 4.9e-5,
            "macro dimension {d}: {} vs {}",
            m[d],
            macro_targets[d]
        );
    }
    CountsBuild { counts }
}

/// Per-company 3×3 joint (sentiment × aspect) tables with the given row and
/// column marginals, steered toward [`CROSS_TARGET`] globally and repaired
/// with marginal-preserving 2×2 swaps.
fn build_joint_tables(sent: &[[u64; 3]], asp: &[[u64; 3]]) -> Vec<[[u64; 3]; 3]> {
    let n_companies = sent.len();

    // Independence baseline per company (row ⊗ col / n), integerized with
    // largest-remainder completion that restores both marginals exactly.
    let mut joints: Vec<[[u64; 3]; 3]> = Vec::with_capacity(n_companies);
    for i in 0..n_companies {
        let n: u64 = sent[i].iter().sum();
        let mut table = [[0u64; 3]; 3];
        let mut frac = [[0f64; 3]; 3];
        let mut row_deficit = [0i64; 3];
        let mut col_deficit = [0i64; 3];
        for s in 0..3 {
            for a in 0..3 {
                let expected = sent[i][s] as f64 * asp[i][a] as f64 / n as f64;
                table[s][a] = expected.floor() as u64;
                frac[s][a] = expected - expected.floor();
            }
        }
        for s in 0..3 {
            row_deficit[s] = sent[i][s] as i64 - table[s].iter().sum::<u64>() as i64;
        }
        for a in 0..3 {
            col_deficit[a] =
                asp[i][a] as i64 - (0..3).map(|s| table[s][a]).sum::<u64>() as i64;
        }
        while row_deficit.iter().sum::<i64>() > 0 {
            let mut best: Option<(f64, usize, usize)> = None;
            for s in 0..3 {
                if row_deficit[s] <= 0 {
                    continue;
                }
                for a in 0..3 {
                    if col_deficit[a] <= 0 {
                        continue;
                    }
                    if best.map(|(f, _, _)| frac[s][a] > f).unwrap_or(true) {
                        best = Some((frac[s][a], s, a));
                    }
                }
            }
            let (_, s, a) = best.expect("row and column deficits pair up");
            table[s][a] += 1;
            row_deficit[s] -= 1;
            col_deficit[a] -= 1;
        }
        joints.push(table);
    }

    // Swap repair: 2×2 rectangle moves shift global cross-cell counts
    // toward the target without touching any marginal. Smallest companies
    // donate first; the largest company's social cells keep a reserve so
    // the crafted topic below has material to work with.
    let mut achieved = [[0i64; 3]; 3];
    for table in &joints {
        for s in 0..3 {
            for a in 0..3 {
                achieved[s][a] += table[s][a] as i64;
            }
        }
    }
    let mut deficit = [[0i64; 3]; 3];
    for s in 0..3 {
        for a in 0..3 {
            deficit[s][a] = CROSS_TARGET[s][a] - achieved[s][a];
        }
    }
    let reserve = |company: usize, s: usize, a: usize| -> u64 {
        if company == 0 && a == Aspect::S.index() {
            [200, 20, 60][s]
        } else {
            0
        }
    };
    let aspect_mean_targets = [0.41, 0.16, -0.25];
    let within = |achieved: &[[i64; 3]; 3], margin: f64| {
        (0..3).all(|a| {
            let mean = (achieved[2][a] - achieved[0][a]) as f64 / ASPECT_TOTALS[a] as f64;
            (mean - aspect_mean_targets[a]).abs() <= margin
        })
    };
    'repair: for _ in 0..500_000 {
        if within(&achieved, 0.004) {
            break;
        }
        let mut pairs: Vec<(i64, usize, usize, usize, usize)> = Vec::new();
        for s1 in 0..3 {
            for a1 in 0..3 {
                if deficit[s1][a1] <= 0 {
                    continue;
                }
                for s2 in 0..3 {
                    if s2 == s1 {
                        continue;
                    }
                    for a2 in 0..3 {
                        if a2 == a1 || deficit[s2][a2] <= 0 {
                            continue;
                        }
                        pairs.push((deficit[s1][a1].min(deficit[s2][a2]), s1, a1, s2, a2));
                    }
                }
            }
        }
        pairs.sort_by(|a, b| b.0.cmp(&a.0));
        for (_, s1, a1, s2, a2) in pairs {
            for i in (0..n_companies).rev() {
                let table = &mut joints[i];
                let avail1 = table[s1][a2].saturating_sub(reserve(i, s1, a2));
                let avail2 = table[s2][a1].saturating_sub(reserve(i, s2, a1));
                let q = (avail1.min(avail2) as i64).min(deficit[s1][a1]).min(deficit[s2][a2]);
                if q <= 0 {
                    continue;
                }
                let q_u = q as u64;
                table[s1][a1] += q_u;
                table[s1][a2] -= q_u;
                table[s2][a1] -= q_u;
                table[s2][a2] += q_u;
                for (grid, sign) in [(&mut achieved, 1i64), (&mut deficit, -1i64)] {
                    grid[s1][a1] += sign * q;
                    grid[s1][a2] -= sign * q;
                    grid[s2][a1] -= sign * q;
                    grid[s2][a2] += sign * q;
                }
                continue 'repair;
            }
        }
        break;
    }

    // The per-aspect mean-sentiment tolerance is ±0.01; the repaired table
    // must sit well inside it.
    let mut achieved = [[0i64; 3]; 3];
    for table in &joints {
        for s in 0..3 {
            for a in 0..3 {
                achieved[s][a] += table[s][a] as i64;
            }
        }
    }
    let aspect_mean_targets = [0.41, 0.16, -0.25];
    for a in 0..3 {
        let diff = achieved[2][a] - achieved[0][a];
        let mean = diff as f64 / ASPECT_TOTALS[a] as f64;
        assert!(
            (mean - aspect_mean_targets[a]).abs() <= 0.008,
            "aspect {a} mean sentiment {mean} vs {}",
            aspect_mean_targets[a]
        );
    }
    joints
}

fn slug(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
        .collect()
}

fn pool_for(aspect: Aspect, selector: usize) -> &'static [&'static str] {
    match aspect {
        Aspect::E => POOLS_E[selector % 3],
        Aspect::S => POOLS_S[selector % 3],
        Aspect::G => POOLS_G[selector % 3],
    }
}

fn summary_from_pool(pool: &[&str], rng: &mut ChaCha8Rng) -> (String, Vec<String>) {
    let len = rng.gen_range(8..=14);
    let tokens: Vec<&str> = (0..len).map(|_| pool[rng.gen_range(0..pool.len())]).collect();
    let mut keywords: Vec<String> = Vec::new();
    while keywords.len() < 2 {
        let k = pool[rng.gen_range(0..pool.len())].to_string();
        if !keywords.contains(&k) {
            keywords.push(k);
        }
    }
    (tokens.join(" "), keywords)
}

const SPAN_DAYS: i64 = 625; // 2023-01-01 ..= 2024-09-16

fn timestamp_for_day(day: i64, rng: &mut ChaCha8Rng) -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2023, 1, 1, 0, 0, 0).unwrap()
        + Duration::days(day)
        + Duration::seconds(rng.gen_range(0..86_400))
}

/// Build the full reference dataset. Deterministic; always 51,087 records
/// satisfying every pinned aggregate (asserted during construction).
pub fn reference_dataset() -> Vec<DatasetRecord> {
    let sizes: Vec<u32> = COMPANIES.iter().map(|&(_, n)| n).collect();
    let sent = build_counts(SENTIMENT_TOTALS, MACRO_SENTIMENT, &sizes);
    let asp = build_counts(ASPECT_TOTALS, MACRO_ASPECT, &sizes);
    let joints = build_joint_tables(&sent.counts, &asp.counts);

    let mut rng = ChaCha8Rng::seed_from_u64(REFERENCE_SEED);

    // Exact score multiset, shuffled once.
    let mut scores: Vec<u8> = Vec::with_capacity(51_087);
    for (idx, &count) in SCORE_HISTOGRAM.iter().enumerate() {
        for _ in 0..count {
            scores.push(idx as u8 + 1);
        }
    }
    scores.shuffle(&mut rng);

    let mut records = Vec::with_capacity(scores.len());
    let mut score_iter = scores.into_iter();
    for (company_idx, &(name, _)) in COMPANIES.iter().enumerate() {
        let joint = &joints[company_idx];
        let company_slug = slug(name);
        let mut seq = 0usize;
        // Collect (sentiment, aspect) cells in a fixed order, then shuffle
        // within the company so cells interleave over time.
        let mut cells: Vec<(Sentiment, Aspect)> = Vec::new();
        for s in SENTIMENTS {
            for a in ASPECTS {
                for _ in 0..joint[s.index()][a.index()] {
                    cells.push((s, a));
                }
            }
        }
        cells.shuffle(&mut rng);
        for (sentiment, aspect) in cells {
            let selector = rng.gen_range(0..3usize);
            let pool = pool_for(aspect, selector);
            let (summary, keywords) = summary_from_pool(pool, &mut rng);
            let mut keywords = keywords;
            // A share of keyword lists carries the company name, which the
            // topic augmentation is expected to strip.
            if rng.gen_bool(0.3) {
                keywords.push(name.to_string());
            }
            let day = rng.gen_range(0..SPAN_DAYS);
            records.push(DatasetRecord {
                company: name.to_string(),
                url: format!("https://news.example/{company_slug}/{seq}"),
                published_at: timestamp_for_day(day, &mut rng),
                summary,
                summary_en: None,
                sentiment,
                aspect,
                relevance_score: score_iter.next().expect("score multiset covers records"),
                keywords,
            });
            seq += 1;
        }
    }
    assert!(score_iter.next().is_none());

    craft_forced_labor_topic(&mut records, &mut rng);
    records
}

/// Rewrite a subset of the largest company's social-aspect records into a
/// coherent "forced labor" topic: negative coverage through 2023, a
/// positive audit spike in December 2023 and renewed negative reports in
/// February 2024.
fn craft_forced_labor_topic(records: &mut [DatasetRecord], rng: &mut ChaCha8Rng) {
    let company = COMPANIES[0].0;
    let mut negatives = Vec::new();
    let mut positives = Vec::new();
    let mut neutrals = Vec::new();
    for (i, r) in records.iter().enumerate() {
        if r.company != company || r.aspect != Aspect::S {
            continue;
        }
        match r.sentiment {
            Sentiment::Negative if negatives.len() < 150 => negatives.push(i),
            Sentiment::Positive if positives.len() < 32 => positives.push(i),
            Sentiment::Neutral if neutrals.len() < 12 => neutrals.push(i),
            _ => {}
        }
    }
    assert!(negatives.len() >= 100, "not enough negative social records: {}", negatives.len());
    assert!(positives.len() >= 20, "not enough positive social records: {}", positives.len());

    let mut rewrite = |idx: usize, day: i64, rng: &mut ChaCha8Rng| {
        let (summary, keywords) = summary_from_pool(&FORCED_LABOR_POOL, rng);
        let r = &mut records[idx];
        r.summary = summary;
        r.keywords = keywords;
        r.published_at = timestamp_for_day(day, rng);
    };

    // Negatives: spread Feb..Nov 2023, with a fifth in Feb 2024.
    for (k, &idx) in negatives.iter().enumerate() {
        let day = if k % 5 == 4 {
            rng.gen_range(397..425) // Feb 2024
        } else {
            32 + ((k as i64 * 271) % 300) // Feb..Nov 2023
        };
        rewrite(idx, day, rng);
    }
    // Positives: audit spike in December 2023, a few strays earlier.
    for (k, &idx) in positives.iter().enumerate() {
        let day = if k % 4 == 3 {
            rng.gen_range(60..330)
        } else {
            rng.gen_range(334..364) // Dec 2023
        };
        rewrite(idx, day, rng);
    }
    for &idx in &neutrals {
        let day = rng.gen_range(32..365);
        rewrite(idx, day, rng);
    }
}

/// Expected terminal state of a synthetic mock-corpus record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Fate {
    DropLanguage,
    DropNoKeyword,
    DropParagraphDup,
    DropEntityGate,
    DropFilterIrrelevant,
    DropConjunction,
    DropSummaryDup,
    DropDetermineIrrelevant,
    Determined,
}

pub struct SyntheticCorpus {
    pub articles: Vec<Article>,
    pub companies: Vec<CompanySpec>,
    /// Marker a mock NER treats as "this mention is not an organization".
    pub non_org_marker: String,
    /// Expected fate per pipeline record key `company_id::article_id`.
    /// Language/no-keyword drops never produce a record; they are keyed by
    /// plain article id.
    pub expectations: std::collections::BTreeMap<String, Fate>,
}

fn synthetic_companies() -> Vec<CompanySpec> {
    vec![
        CompanySpec {
            company_id: "aurora".into(),
            display_name: "Aurora Motoren".into(),
            keywords: vec![Keyword::from("Aurora"), Keyword::from("Aurora Motoren")],
            related_company_ids: vec!["boreal".into()],
        },
        CompanySpec {
            company_id: "boreal".into(),
            display_name: "Boreal Energie".into(),
            keywords: vec![Keyword::from("Boreal")],
            related_company_ids: vec![],
        },
        CompanySpec {
            company_id: "cantus".into(),
            display_name: "Cantus Bank".into(),
            keywords: vec![Keyword::from("Cantus")],
            related_company_ids: vec![],
        },
    ]
}

/// Build a marker-driven corpus whose articles are designed to fall out of
/// the pipeline at known stages. ~`n` articles; pass `n >= 60` to get every
/// category populated. Every keyword paragraph carries a run of
/// article-unique tokens so distinct articles never collide with the 0.8
/// dedup threshold, while designed duplicate pairs share text exactly.
pub fn mock_corpus(n: usize, seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let companies = synthetic_companies();
    let non_org_marker = "NONORG".to_string();
    let mut articles = Vec::new();
    let mut expectations = std::collections::BTreeMap::new();

    let company_keyword = |i: usize| -> (&'static str, &'static str) {
        match i % 3 {
            0 => ("aurora", "Aurora"),
            1 => ("boreal", "Boreal"),
            _ => ("cantus", "Cantus"),
        }
    };
    let base = Utc.with_ymd_and_hms(2023, 1, 2, 9, 0, 0).unwrap();
    let mut seq = 0usize;
    let mut next_id = move || {
        let id = format!("a{seq:04}");
        seq += 1;
        id
    };

    // Eight tokens unique to one article (or one duplicate pair).
    let uniq = |tag: &str| -> String {
        (0..8).map(|w| format!("zz{tag}w{w}")).collect::<Vec<_>>().join(" ")
    };

    let make_article = |id: &str,
                        language: &str,
                        title: String,
                        paragraphs: Vec<String>,
                        day: i64,
                        rng: &mut ChaCha8Rng| Article {
        id: id.to_string(),
        company_id: String::new(),
        url: format!("https://mock.example/{id}"),
        title,
        paragraphs,
        published_at: base + Duration::days(day) + Duration::seconds(rng.gen_range(0..3600)),
        language: language.to_string(),
    };

    // Category sizes scale with n.
    let unit = (n / 20).max(1);
    let mut day_cursor = 0i64;
    let mut bump_day = |rng: &mut ChaCha8Rng| {
        day_cursor += rng.gen_range(0..3);
        if day_cursor > 600 {
            day_cursor = 0;
        }
        day_cursor
    };

    // 1. Wrong-language articles (1 unit).
    for k in 0..unit {
        let id = next_id();
        let (_, kw) = company_keyword(rng.gen_range(0..3));
        let day = bump_day(&mut rng);
        let a = make_article(
            &id,
            "fr",
            format!("Article {id}"),
            vec![format!("{kw} annonce des résultats {}.", uniq(&format!("lang{k}")))],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(id, Fate::DropLanguage);
    }

    // 2. No-keyword articles (1 unit).
    for k in 0..unit {
        let id = next_id();
        let day = bump_day(&mut rng);
        let a = make_article(
            &id,
            "de",
            format!("Artikel {id}"),
            vec![format!("Keine relevanten Firmen erwähnt {}.", uniq(&format!("nokw{k}")))],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(id, Fate::DropNoKeyword);
    }

    // 3. Paragraph-duplicate pairs (1 unit of pairs): identical keyword
    // paragraph a day apart. The follow-up also carries pass markers, which
    // it must never reach.
    for k in 0..unit {
        let (cid, kw) = company_keyword(k);
        let day = bump_day(&mut rng);
        let keyword_para = format!(
            "{kw} startet Programm RELEVANT ESG_DIRECT ESG_POS ASPECT_E SCORE_7 KW_klima {}.",
            uniq(&format!("pardup{k}"))
        );
        let id1 = next_id();
        let a1 = make_article(
            &id1,
            "de",
            format!("Original {k}"),
            vec![format!("Einleitung {}.", uniq(&format!("parorig{k}"))), keyword_para.clone()],
            day,
            &mut rng,
        );
        let id2 = next_id();
        let a2 = make_article(
            &id2,
            "de",
            format!("Nachdruck {k}"),
            vec![format!("Einleitung {}.", uniq(&format!("parrepr{k}"))), keyword_para],
            day + 1,
            &mut rng,
        );
        articles.push(a1);
        articles.push(a2);
        expectations.insert(format!("{cid}::{id1}"), Fate::Determined);
        expectations.insert(format!("{cid}::{id2}"), Fate::DropParagraphDup);
    }

    // 4. Entity-gate drops (1 unit): keyword sentence carries the non-org
    // marker the mock NER blocks on.
    for k in 0..unit {
        let id = next_id();
        let (cid, kw) = company_keyword(k);
        let day = bump_day(&mut rng);
        let a = make_article(
            &id,
            "de",
            format!("Bündnis {k}"),
            vec![format!(
                "Eine {kw} der Staaten NONORG entsteht RELEVANT ESG_DIRECT {}.",
                uniq(&format!("gate{k}"))
            )],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(format!("{cid}::{id}"), Fate::DropEntityGate);
    }

    // 5. Filter-irrelevant (2 units).
    for k in 0..(2 * unit) {
        let id = next_id();
        let (cid, kw) = company_keyword(k);
        let day = bump_day(&mut rng);
        let a = make_article(
            &id,
            "en",
            format!("Quarterly {k}"),
            vec![format!(
                "{kw} stock moved sideways FILTER_IRRELEVANT {}.",
                uniq(&format!("fin{k}"))
            )],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(format!("{cid}::{id}"), Fate::DropFilterIrrelevant);
    }

    // 6. Relevant but not directly ESG (1 unit): conjunction gate drops.
    for k in 0..unit {
        let id = next_id();
        let (cid, kw) = company_keyword(k);
        let day = bump_day(&mut rng);
        let a = make_article(
            &id,
            "de",
            format!("Indirekt {k}"),
            vec![format!("{kw} im Fokus RELEVANT {}.", uniq(&format!("ind{k}")))],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(format!("{cid}::{id}"), Fate::DropConjunction);
    }

    // 7. Summary-duplicate pairs (1 unit of pairs): same title + first
    // paragraph (the mock summary source), different keyword paragraphs.
    for k in 0..unit {
        let (cid, kw) = company_keyword(k);
        let day = bump_day(&mut rng);
        let intro: Vec<String> = (0..32).map(|w| format!("woerter{k}w{w}")).collect();
        let intro = intro.join(" ");
        let id1 = next_id();
        let a1 = make_article(
            &id1,
            "de",
            format!("Serie {k}"),
            vec![
                intro.clone(),
                format!(
                    "{kw} Bericht RELEVANT ESG_DIRECT ESG_NEG ASPECT_S SCORE_6 KW_streik {}.",
                    uniq(&format!("sum{k}a"))
                ),
            ],
            day,
            &mut rng,
        );
        let id2 = next_id();
        let a2 = make_article(
            &id2,
            "de",
            format!("Serie {k}"),
            vec![
                intro,
                format!(
                    "{kw} Bericht RELEVANT ESG_DIRECT ESG_NEG ASPECT_S SCORE_6 KW_streik {}.",
                    uniq(&format!("sum{k}b"))
                ),
            ],
            day + 2,
            &mut rng,
        );
        articles.push(a1);
        articles.push(a2);
        expectations.insert(format!("{cid}::{id1}"), Fate::Determined);
        expectations.insert(format!("{cid}::{id2}"), Fate::DropSummaryDup);
    }

    // 8. Irrelevant at determination (1 unit).
    for k in 0..unit {
        let id = next_id();
        let (cid, kw) = company_keyword(k);
        let day = bump_day(&mut rng);
        let a = make_article(
            &id,
            "de",
            format!("Grenzfall {k}"),
            vec![format!(
                "{kw} Randnotiz RELEVANT ESG_DIRECT IRRELEVANT {}.",
                uniq(&format!("det{k}"))
            )],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(format!("{cid}::{id}"), Fate::DropDetermineIrrelevant);
    }

    // 9. One article mentioning two companies: two independent records.
    {
        let id = next_id();
        let day = bump_day(&mut rng);
        let a = make_article(
            &id,
            "de",
            "Kooperation".into(),
            vec![format!(
                "Aurora und Boreal vereinbaren Zusammenarbeit RELEVANT ESG_DIRECT ESG_POS ASPECT_E SCORE_8 KW_energiewende {}.",
                uniq("koop")
            )],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(format!("aurora::{id}"), Fate::Determined);
        expectations.insert(format!("boreal::{id}"), Fate::Determined);
    }

    // 10. Fill the rest with pass-through articles carrying varied markers.
    while articles.len() < n {
        let id = next_id();
        let c = rng.gen_range(0..3);
        let (cid, kw) = company_keyword(c);
        let day = bump_day(&mut rng);
        let sentiment_marker = ["ESG_POS", "ESG_NEG", "ESG_NEU"][rng.gen_range(0..3)];
        let aspect_marker = ["ASPECT_E", "ASPECT_S", "ASPECT_G"][rng.gen_range(0..3)];
        let score = rng.gen_range(4..=9);
        let a = make_article(
            &id,
            if rng.gen_bool(0.5) { "de" } else { "en" },
            format!("Meldung {id}"),
            vec![
                format!("Hintergrund {}.", uniq(&format!("bg{id}"))),
                format!(
                    "{kw} Nachhaltigkeit RELEVANT ESG_DIRECT {sentiment_marker} {aspect_marker} SCORE_{score} KW_esg {}.",
                    uniq(&format!("pass{id}"))
                ),
            ],
            day,
            &mut rng,
        );
        articles.push(a);
        expectations.insert(format!("{cid}::{id}"), Fate::Determined);
    }

    SyntheticCorpus { articles, companies, non_org_marker, expectations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics;

    #[test]
    fn reference_dataset_hits_every_pinned_marginal() {
        let records = reference_dataset();
        assert_eq!(records.len(), 51_087);

        let stats = analytics::aggregate_counts(&records);
        assert_eq!(stats.sentiment_totals, SENTIMENT_TOTALS);
        assert_eq!(stats.aspect_totals, ASPECT_TOTALS);
        for d in 0..3 {
            assert_eq!(
                (stats.macro_sentiment_ratios[d] * 10_000.0).round() / 10_000.0,
                MACRO_SENTIMENT[d]
            );
            assert_eq!(
                (stats.macro_aspect_ratios[d] * 10_000.0).round() / 10_000.0,
                MACRO_ASPECT[d]
            );
        }

        let histogram = analytics::relevance_histogram(&records).unwrap();
        assert_eq!(histogram.counts, SCORE_HISTOGRAM);
        assert!((histogram.mean - 7.12).abs() < 0.005);

        let companies = analytics::company_totals(&records);
        assert_eq!(companies.len(), 41);
        let min = companies.values().map(|c| c.count).min().unwrap();
        let max = companies.values().map(|c| c.count).max().unwrap();
        assert_eq!(min, 77);
        assert_eq!(max, 7233);
        assert_eq!(companies["Hannover Re"].count, 77);
        assert_eq!(companies["Volkswagen"].count, 7233);

        let means = analytics::overall_aspect_mean_sentiment(&records);
        assert!((means[0].unwrap() - 0.41).abs() <= 0.01);
        assert!((means[1].unwrap() - 0.16).abs() <= 0.01);
        assert!((means[2].unwrap() - -0.25).abs() <= 0.01);
    }

    #[test]
    fn reference_dataset_is_deterministic() {
        let a = reference_dataset();
        let b = reference_dataset();
        assert_eq!(a.len(), b.len());
        assert_eq!(a[0], b[0]);
        assert_eq!(a[a.len() - 1], b[b.len() - 1]);
        assert_eq!(a[12345], b[12345]);
    }

    #[test]
    fn forced_labor_topic_is_present_with_expected_shape() {
        let records = reference_dataset();
        let fl: Vec<&DatasetRecord> = records
            .iter()
            .filter(|r| r.summary.contains("zwangsarbeit") || r.summary.contains("xinjiang"))
            .collect();
        assert!(fl.len() >= 120, "forced-labor subset too small: {}", fl.len());
        assert!(fl.iter().all(|r| r.company == "Volkswagen"));

        let neg_2023 = fl
            .iter()
            .filter(|r| {
                r.sentiment == Sentiment::Negative
                    && r.published_at < Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
            })
            .count();
        let pos_dec = fl
            .iter()
            .filter(|r| {
                r.sentiment == Sentiment::Positive
                    && r.published_at >= Utc.with_ymd_and_hms(2023, 12, 1, 0, 0, 0).unwrap()
                    && r.published_at < Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap()
            })
            .count();
        let neg_feb_2024 = fl
            .iter()
            .filter(|r| {
                r.sentiment == Sentiment::Negative
                    && r.published_at >= Utc.with_ymd_and_hms(2024, 2, 1, 0, 0, 0).unwrap()
                    && r.published_at < Utc.with_ymd_and_hms(2024, 3, 1, 0, 0, 0).unwrap()
            })
            .count();
        assert!(neg_2023 >= 80, "neg 2023 {neg_2023}");
        assert!(pos_dec >= 15, "pos dec {pos_dec}");
        assert!(neg_feb_2024 >= 10, "neg feb 2024 {neg_feb_2024}");
    }

    #[test]
    fn mock_corpus_covers_every_fate() {
        let corpus = mock_corpus(200, 7);
        assert_eq!(corpus.articles.len(), 200);
        let fates: std::collections::BTreeSet<Fate> =
            corpus.expectations.values().copied().collect();
        for fate in [
            Fate::DropLanguage,
            Fate::DropNoKeyword,
            Fate::DropParagraphDup,
            Fate::DropEntityGate,
            Fate::DropFilterIrrelevant,
            Fate::DropConjunction,
            Fate::DropSummaryDup,
            Fate::DropDetermineIrrelevant,
            Fate::Determined,
        ] {
            assert!(fates.contains(&fate), "missing {fate:?}");
        }
        // Deterministic under the seed.
        let again = mock_corpus(200, 7);
        assert_eq!(corpus.articles.len(), again.articles.len());
        assert_eq!(corpus.articles[0], again.articles[0]);
        assert_eq!(corpus.articles[199], again.articles[199]);
    }
}
