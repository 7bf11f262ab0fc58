//! Synthetic clinical-style corpus generator.
//!
//! Sentences come from bracketed templates with typed slots, so every generated
//! sentence carries a valid constituency tree. Identifier terms from an
//! [`IdentifierLexicon`] are planted through category-specific templates until
//! each category reaches its requested share of all words.

use std::collections::BTreeMap;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{parse_tree, Corpus, Document, Label, Sentence};
use crate::audit::IdentifierLexicon;
use crate::error::{Error, Result};
use crate::seed::rng_for;

/// Highest per-category plant rate the identifier templates can reach.
pub const MAX_PLANT_RATE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub n_docs: usize,
    pub case_fraction: f64,
    /// Inclusive range of template sentences per document, before planting.
    pub sentences_per_doc: (usize, usize),
    /// Category name -> share of all words that should be identifier words.
    pub plant_rates: BTreeMap<String, f64>,
    pub lexicon: IdentifierLexicon,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        let plant_rates = [
            ("name", 0.0045),
            ("location", 0.0060),
            ("occupation", 0.0005),
            ("drug", 0.0005),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        SynthSpec {
            n_docs: 200,
            case_fraction: 0.10,
            sentences_per_doc: (14, 22),
            plant_rates,
            lexicon: IdentifierLexicon::builtin(),
            seed: 42,
        }
    }
}

const SUBJECTS: &[&str] = &[
    "(NP (DT the) (NN patient))",
    "(NP (PRP she))",
    "(NP (PRP he))",
    "(NP (DT the) (NN pt))",
    "(NP (PRP$ our) (NN patient))",
];

const FINDINGS: &[&str] = &[
    "(NP (NN dyspnea))",
    "(NP (NN chest) (NN pain))",
    "(NP (JJ mild) (NN chest) (NN pain))",
    "(NP (JJ substernal) (NN chest) (NN pressure))",
    "(NP (JJ intermittent) (NNS palpitations))",
    "(NP (JJ bilateral) (JJ lower) (NN extremity) (NN edema))",
    "(NP (DT no) (JJ acute) (NN distress))",
    "(NP (NN shortness) (PP (IN of) (NP (NN breath))))",
    "(NP (JJ new) (NN onset) (NN fatigue))",
    "(NP (NN nausea) (CC and) (NN diaphoresis))",
    "(NP (JJ mild) (NN tachycardia))",
    "(NP (JJ worsening) (NN orthopnea))",
    "(NP (DT a) (JJ systolic) (NN murmur))",
    "(NP (JJ elevated) (NN troponin))",
    "(NP (NN lightheadedness))",
    "(NP (JJ productive) (NN cough))",
    "(NP (JJ low) (NN grade) (NNS fevers))",
    "(NP (JJ poor) (NN appetite))",
    "(NP (JJ decreased) (NN exercise) (NN tolerance))",
    "(NP (NN dizziness) (PP (IN on) (NP (NN standing))))",
];

const CASE_FINDINGS: &[&str] = &[
    "(NP (JJ elevated) (NN blood) (NN pressure))",
    "(NP (JJ uncontrolled) (NN hypertension))",
    "(NP (JJ hypertensive) (NN urgency))",
    "(NP (JJ severe) (NNS headaches))",
    "(NP (JJ left) (JJ ventricular) (NN hypertrophy))",
    "(NP (JJ blurred) (NN vision))",
];

const CONTROL_FINDINGS: &[&str] = &[
    "(NP (JJ normal) (NN blood) (NN pressure))",
    "(NP (JJ normal) (NN sinus) (NN rhythm))",
    "(NP (JJ mild) (NN anemia))",
    "(NP (JJ seasonal) (NNS allergies))",
];

const PROCEDURES: &[&str] = &[
    "(NP (DT a) (NN chest) (NN xray))",
    "(NP (DT an) (NN echocardiogram))",
    "(NP (JJ cardiac) (NN catheterization))",
    "(NP (DT a) (NN stress) (NN test))",
    "(NP (DT a) (NN ct) (NN scan))",
    "(NP (DT an) (NN ekg))",
    "(NP (JJ routine) (NNS labs))",
    "(NP (DT a) (JJ repeat) (NN troponin))",
];

const MEDICATIONS: &[&str] = &[
    "(NP (NN aspirin))",
    "(NP (NN metoprolol))",
    "(NP (NN lisinopril))",
    "(NP (JJ iv) (NN furosemide))",
    "(NP (NN atorvastatin) (CD 80) (NN mg))",
    "(NP (NN heparin) (NN drip))",
    "(NP (JJ sublingual) (NN nitroglycerin))",
    "(NP (NN amlodipine))",
    "(NP (NN hydrochlorothiazide))",
];

const BASE_TEMPLATES: &[&str] = &[
    "(S {SUBJ} (VP (VBZ denies) {FIND}) (. .))",
    "(S {SUBJ} (VP (VBD was) (VP (VBN admitted) (PP (IN with) {FIND}))) (. .))",
    "(S {SUBJ} (VP (VBD underwent) {PROC}) (. .))",
    "(S {SUBJ} (VP (VBD reported) {FIND} (PP (IN since) (NP (NN yesterday)))) (. .))",
    "(S (NP (DT the) (NN exam)) (VP (VBD showed) {FIND}) (. .))",
    "(S {SUBJ} (VP (VBD was) (VP (VBN started) (PP (IN on) {MED}))) (. .))",
    "(S {PROC} (VP (VBD revealed) {FIND}) (. .))",
    "(S {SUBJ} (VP (MD will) (VP (VB follow) (PRT (RP up)) (PP (IN with) (NP (NN cardiology))))) (. .))",
    "(S {SUBJ} (VP (VBZ remains) (ADJP (JJ stable))) (. .))",
    "(S (NP (NNS vitals)) (VP (VBD were) (ADJP (JJ stable))) (. .))",
    "(S {SUBJ} (VP (VBD tolerated) {PROC} (ADVP (RB well))) (. .))",
    "(S {SUBJ} (VP (VBD continued) (PP (IN on) {MED})) (. .))",
    "(S {SUBJ} (VP (VBZ complains) (PP (IN of) {FIND})) (. .))",
    "(S (NP (NN plan)) (VP (VBZ is) (VP (TO to) (VP (VB repeat) {PROC}))) (. .))",
];

// Name slots: {LAST} patient surname, {FULL} patient first + last,
// {STAFF} attending surname shared across the corpus, {ID} any lexicon term.
const NAME_TEMPLATES: &[&str] = &[
    "(S (NP {TITLE} {LAST}) (VP (VBD presented) (PP (IN with) {FIND})) (. .))",
    "(S (NP {FULL}) (VP (VBZ is) (NP (DT a) (CD 65) (NN year) (JJ old) (NN adult))) (. .))",
    "(S {SUBJ} (VP (VBD was) (VP (VBN seen) (PP (IN by) (NP (NNP Dr.) {STAFF})))) (. .))",
    "(S (NP (NNP Dr.) {STAFF}) (VP (VBD reviewed) (NP (DT the) (NNS films))) (. .))",
    "(S (NP (NN contact)) (VP (VBZ is) (NP (NP (PRP$ her) (NN daughter)) (NP {ID}))) (. .))",
];

const LOCATION_TEMPLATES: &[&str] = &[
    "(S {SUBJ} (VP (VBD was) (VP (VBN transferred) (PP (IN from) (NP {ID})))) (. .))",
    "(S {SUBJ} (VP (VBZ lives) (PP (IN in) (NP {ID})) (PP (IN with) (NP (PRP$ her) (NN husband)))) (. .))",
    "(S {SUBJ} (VP (VBD returned) (PP (IN from) (NP (NN travel))) (PP (IN to) (NP {ID}))) (. .))",
    "(S (NP (NN follow) (NN up)) (VP (VBN arranged) (PP (IN at) (NP {ID}))) (. .))",
];

const OCCUPATION_TEMPLATES: &[&str] = &[
    "(S (NP (NN occupation)) (: :) (NP {ID}) (. .))",
    "(S {SUBJ} (VP (VBZ works) (PP (IN as) (NP (DT a) {ID}))) (. .))",
    "(S {SUBJ} (VP (VBD retired) (PP (IN from) (NP (NN work))) (PP (IN as) (NP (DT a) {ID}))) (. .))",
];

const DRUG_TEMPLATES: &[&str] = &[
    "(S {SUBJ} (VP (VBD was) (VP (VBN enrolled) (PP (IN in) (NP (DT a) (JJ clinical) (NN trial) (PP (IN of) (NP {ID})))))) (. .))",
    "(S (NP (NN home) (NNS medications)) (VP (VBD included) (NP {ID})) (. .))",
    "(S {SUBJ} (VP (VBD was) (VP (VBN switched) (PP (IN to) (NP {ID})))) (. .))",
];

const CUSTOM_TEMPLATES: &[&str] = &["(S (NP (NN note)) (: :) (NP {ID}) (. .))"];

fn templates_for(category: &str) -> &'static [&'static str] {
    match category {
        "name" => NAME_TEMPLATES,
        "location" => LOCATION_TEMPLATES,
        "occupation" => OCCUPATION_TEMPLATES,
        "drug" => DRUG_TEMPLATES,
        _ => CUSTOM_TEMPLATES,
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Renders a lexicon term as a run of proper-noun pre-terminals.
fn proper_nouns(term: &str) -> String {
    term.split(' ')
        .map(|w| format!("(NNP {})", capitalize(w)))
        .collect::<Vec<_>>()
        .join(" ")
}

struct DocPersona {
    first: String,
    last: String,
}

struct Filler<'a> {
    label: Label,
    persona: &'a DocPersona,
    staff: &'a [String],
    // terms of the category being planted, if any
    terms: &'a [String],
}

impl Filler<'_> {
    /// Expands all slots; returns the bracketed sentence and the number of planted identifier words.
    fn expand(&self, template: &str, rng: &mut ChaCha8Rng) -> (String, usize) {
        let mut out = String::with_capacity(template.len() * 2);
        let mut planted = 0;
        let mut rest = template;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let close = open + rest[open..].find('}').expect("template slot is closed");
            let slot = &rest[open + 1..close];
            let filled = match slot {
                "SUBJ" => SUBJECTS.choose(rng).unwrap().to_string(),
                "FIND" => self.finding(rng).to_string(),
                "PROC" => PROCEDURES.choose(rng).unwrap().to_string(),
                "MED" => MEDICATIONS.choose(rng).unwrap().to_string(),
                "TITLE" => ["(NNP Mr.)", "(NNP Ms.)"].choose(rng).unwrap().to_string(),
                "LAST" => {
                    planted += 1;
                    proper_nouns(&self.persona.last)
                }
                "FULL" => {
                    planted += 2;
                    format!(
                        "{} {}",
                        proper_nouns(&self.persona.first),
                        proper_nouns(&self.persona.last)
                    )
                }
                "STAFF" => {
                    planted += 1;
                    proper_nouns(self.staff.choose(rng).unwrap())
                }
                "ID" => {
                    let term = self.terms.choose(rng).expect("planted category has terms");
                    planted += term.split(' ').count();
                    proper_nouns(term)
                }
                other => unreachable!("unknown template slot {other}"),
            };
            out.push_str(&filled);
            rest = &rest[close + 1..];
        }
        out.push_str(rest);
        (out, planted)
    }

    fn finding(&self, rng: &mut ChaCha8Rng) -> &'static str {
        let specific = match self.label {
            Label::Case => CASE_FINDINGS,
            Label::Control => CONTROL_FINDINGS,
        };
        if rng.random_bool(0.3) {
            specific.choose(rng).unwrap()
        } else {
            FINDINGS.choose(rng).unwrap()
        }
    }
}

fn validate(spec: &SynthSpec) -> Result<()> {
    if spec.n_docs == 0 {
        return Err(Error::Validation("n_docs must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&spec.case_fraction) {
        return Err(Error::Validation(format!(
            "case_fraction {} outside [0, 1]",
            spec.case_fraction
        )));
    }
    let (lo, hi) = spec.sentences_per_doc;
    if lo == 0 || lo > hi {
        return Err(Error::Validation(format!(
            "sentences_per_doc range ({lo}, {hi}) is empty or starts at 0"
        )));
    }
    for (cat, &rate) in &spec.plant_rates {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Validation(format!(
                "plant rate {rate} for `{cat}` outside [0, 1]"
            )));
        }
        if rate > MAX_PLANT_RATE {
            return Err(Error::Validation(format!(
                "plant rate {rate} for `{cat}` exceeds the generator maximum {MAX_PLANT_RATE}"
            )));
        }
        if rate > 0.0 {
            let terms = spec.lexicon.category(cat).map_or(0, |c| c.terms.len());
            if terms == 0 {
                return Err(Error::Validation(format!(
                    "plant rate given for `{cat}` but the lexicon has no terms in that category"
                )));
            }
        }
    }
    Ok(())
}

/// Generates a deterministic labeled corpus with trees and planted identifiers.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<Corpus> {
    validate(spec)?;
    let mut rng = rng_for(spec.seed, "synthetic");

    let n_case = ((spec.case_fraction * spec.n_docs as f64).round() as usize).min(spec.n_docs);
    let mut labels: Vec<Label> = std::iter::repeat_n(Label::Case, n_case)
        .chain(std::iter::repeat_n(Label::Control, spec.n_docs - n_case))
        .collect();
    labels.shuffle(&mut rng);

    let name_terms: Vec<String> = spec
        .lexicon
        .category("name")
        .map(|c| {
            c.terms
                .iter()
                .filter(|t| !t.contains(' '))
                .cloned()
                .collect()
        })
        .unwrap_or_default();
    let staff: Vec<String> = if name_terms.is_empty() {
        Vec::new()
    } else {
        (0..6)
            .map(|_| name_terms.choose(&mut rng).unwrap().clone())
            .collect()
    };
    let personas: Vec<DocPersona> = (0..spec.n_docs)
        .map(|_| DocPersona {
            first: name_terms.choose(&mut rng).cloned().unwrap_or_default(),
            last: name_terms.choose(&mut rng).cloned().unwrap_or_default(),
        })
        .collect();

    let mut docs: Vec<Vec<String>> = Vec::with_capacity(spec.n_docs);
    let mut total_words = 0usize;
    for (i, &label) in labels.iter().enumerate() {
        let filler = Filler {
            label,
            persona: &personas[i],
            staff: &staff,
            terms: &[],
        };
        let n = rng.random_range(spec.sentences_per_doc.0..=spec.sentences_per_doc.1);
        let sentences: Vec<String> = (0..n)
            .map(|_| {
                let t = BASE_TEMPLATES.choose(&mut rng).unwrap();
                filler.expand(t, &mut rng).0
            })
            .collect();
        total_words += sentences.iter().map(|s| count_words(s)).sum::<usize>();
        docs.push(sentences);
    }

    // Plant identifiers round-robin until every category reaches its target share.
    let planting: Vec<(String, f64, Vec<String>)> = spec
        .lexicon
        .categories()
        .iter()
        .filter_map(|c| {
            let rate = spec.plant_rates.get(&c.name).copied().unwrap_or(0.0);
            (rate > 0.0).then(|| (c.name.clone(), rate, c.terms.iter().cloned().collect()))
        })
        .collect();
    let mut planted = vec![0usize; planting.len()];
    loop {
        let mut added = false;
        for (k, (cat, rate, terms)) in planting.iter().enumerate() {
            if (planted[k] as f64) >= rate * total_words as f64 {
                continue;
            }
            let d = rng.random_range(0..spec.n_docs);
            let filler = Filler {
                label: labels[d],
                persona: &personas[d],
                staff: &staff,
                terms,
            };
            let template = templates_for(cat).choose(&mut rng).unwrap();
            let (sentence, n_planted) = filler.expand(template, &mut rng);
            let at = rng.random_range(0..=docs[d].len());
            total_words += count_words(&sentence);
            planted[k] += n_planted;
            docs[d].insert(at, sentence);
            added = true;
        }
        if !added {
            break;
        }
    }

    let width = spec.n_docs.to_string().len().max(5);
    let documents = docs
        .into_iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (sentences, label))| {
            let sentences = sentences
                .iter()
                .map(|s| parse_tree(s, 0))
                .collect::<Result<Vec<Sentence>>>()?;
            Document::new(format!("doc-{i:0width$}"), Some(label), sentences)
        })
        .collect::<Result<Vec<_>>>()?;
    Corpus::new(documents)
}

fn count_words(bracketed: &str) -> usize {
    // every pre-terminal closes with `word)` where word is not `)`
    bracketed
        .split(')')
        .filter(|chunk| {
            chunk
                .rsplit(' ')
                .next()
                .is_some_and(|w| !w.is_empty() && !w.starts_with('('))
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audit::scan_identifiers;
    use crate::corpus::write_jsonl;

    fn serialize(c: &Corpus) -> Vec<u8> {
        let mut buf = Vec::new();
        write_jsonl(c, &mut buf).unwrap();
        buf
    }

    fn sentences(c: &Corpus) -> Vec<Vec<String>> {
        c.documents()
            .iter()
            .flat_map(|d| {
                d.sentences
                    .iter()
                    .map(|s| s.forms().map(String::from).collect())
            })
            .collect()
    }

    #[test]
    fn word_counter_matches_parse() {
        for t in BASE_TEMPLATES.iter().chain(NAME_TEMPLATES) {
            let filler = Filler {
                label: Label::Case,
                persona: &DocPersona {
                    first: "mary".into(),
                    last: "jones".into(),
                },
                staff: &["smith".to_string()],
                terms: &["new bedford".to_string()],
            };
            let mut rng = rng_for(1, "t");
            let (s, _) = filler.expand(t, &mut rng);
            assert_eq!(
                count_words(&s),
                parse_tree(&s, 0).unwrap().tokens.len(),
                "{s}"
            );
        }
    }

    #[test]
    fn label_counts_follow_case_fraction() {
        let spec = SynthSpec::default();
        let c = generate_synthetic(&spec).unwrap();
        assert_eq!(c.len(), 200);
        assert_eq!(c.label_count(Some(Label::Case)), 20);
        assert_eq!(c.label_count(Some(Label::Control)), 180);
        assert!(c.documents().iter().all(Document::has_trees));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let spec = SynthSpec {
            n_docs: 40,
            ..SynthSpec::default()
        };
        let a = serialize(&generate_synthetic(&spec).unwrap());
        let b = serialize(&generate_synthetic(&spec).unwrap());
        assert_eq!(a, b);
        let other = SynthSpec { seed: 7, ..spec };
        assert_ne!(a, serialize(&generate_synthetic(&other).unwrap()));
    }

    #[test]
    fn base_vocabulary_has_no_identifiers() {
        let spec = SynthSpec {
            plant_rates: BTreeMap::new(),
            ..SynthSpec::default()
        };
        let c = generate_synthetic(&spec).unwrap();
        let counts = scan_identifiers(sentences(&c), &spec.lexicon);
        assert_eq!(counts.union, 0);
    }

    #[test]
    fn name_plant_rate_within_twenty_percent() {
        let spec = SynthSpec {
            plant_rates: [("name".to_string(), 0.005)].into_iter().collect(),
            ..SynthSpec::default()
        };
        let c = generate_synthetic(&spec).unwrap();
        let counts = scan_identifiers(sentences(&c), &spec.lexicon);
        let share = counts.get("name").unwrap() as f64 / counts.total_words as f64;
        assert!((share - 0.005).abs() <= 0.2 * 0.005, "share {share}");
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = SynthSpec::default();
        spec.plant_rates.insert("name".into(), 1.5);
        assert!(matches!(
            generate_synthetic(&spec),
            Err(Error::Validation(_))
        ));
        spec.plant_rates.insert("name".into(), 0.5);
        assert!(matches!(
            generate_synthetic(&spec),
            Err(Error::Validation(_))
        ));
        let spec = SynthSpec {
            n_docs: 0,
            ..SynthSpec::default()
        };
        assert!(generate_synthetic(&spec).is_err());
        let spec = SynthSpec {
            case_fraction: 1.2,
            ..SynthSpec::default()
        };
        assert!(generate_synthetic(&spec).is_err());
    }
}
