use std::collections::HashSet;
use std::path::Path;
use std::{fs, io};

/// Word lists driving sentence classification and fact analysis.
///
/// Each list is a plain UTF-8 file with one lowercase token per line; blank
/// lines and `#` comments are ignored.
#[derive(Clone, Debug)]
pub struct Lexicon {
    pub negation: HashSet<String>,
    pub absolute_always: HashSet<String>,
    pub absolute_never: HashSet<String>,
    pub qualified: HashSet<String>,
    pub articles: HashSet<String>,
    pub step_markers: HashSet<String>,
    pub modals: HashSet<String>,
    pub verbs: HashSet<String>,
    pub categories: HashSet<String>,
}

const FILES: [&str; 9] = [
    "negation.txt",
    "absolute_always.txt",
    "absolute_never.txt",
    "qualified.txt",
    "articles.txt",
    "step_markers.txt",
    "modals.txt",
    "verbs.txt",
    "categories.txt",
];

/// Parses a word-list file body.
pub fn parse_word_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

impl Lexicon {
    fn from_texts(texts: [&str; 9]) -> Self {
        let [negation, absolute_always, absolute_never, qualified, articles, step_markers, modals, verbs, categories] =
            texts.map(parse_word_list);
        Self { negation, absolute_always, absolute_never, qualified, articles, step_markers, modals, verbs, categories }
    }

    /// The lists shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_texts([
            include_str!("../../../data/lexicon/negation.txt"),
            include_str!("../../../data/lexicon/absolute_always.txt"),
            include_str!("../../../data/lexicon/absolute_never.txt"),
            include_str!("../../../data/lexicon/qualified.txt"),
            include_str!("../../../data/lexicon/articles.txt"),
            include_str!("../../../data/lexicon/step_markers.txt"),
            include_str!("../../../data/lexicon/modals.txt"),
            include_str!("../../../data/lexicon/verbs.txt"),
            include_str!("../../../data/lexicon/categories.txt"),
        ])
    }

    /// Loads all nine lists from a directory using the shipped file names.
    pub fn from_dir(dir: &Path) -> io::Result<Self> {
        let mut texts = Vec::with_capacity(FILES.len());
        for name in FILES {
            texts.push(fs::read_to_string(dir.join(name))?);
        }
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        Ok(Self::from_texts(refs.try_into().expect("nine lists")))
    }
}
