//! `corpus build` and `corpus stats`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use slicetype::{Arrangement, NgramModel};

use crate::Common;

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Plain-text files to count words and adjacent word pairs in.
    #[arg(long, num_args = 1..)]
    pub text: Vec<PathBuf>,
    /// An existing corpus directory to read instead of text.
    #[arg(long, conflicts_with = "text")]
    pub from: Option<PathBuf>,
    /// Drop word pairs seen fewer times than this.
    #[arg(long, default_value_t = 1)]
    pub min_pair_count: u64,
    /// Output directory for unigrams.tsv and bigrams.tsv.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn build(args: &BuildArgs) -> Result<()> {
    let model = match &args.from {
        Some(dir) => NgramModel::load_dir(dir).with_context(|| format!("loading {}", dir.display()))?,
        None if args.text.is_empty() => bail!("give --text files or --from a corpus directory"),
        None => {
            let mut texts = Vec::new();
            for path in &args.text {
                texts.push(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?);
            }
            count_text(texts.iter().map(String::as_str), args.min_pair_count)?
        }
    };
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("unigrams.tsv"), model.unigram_tsv())?;
    fs::write(args.out.join("bigrams.tsv"), model.bigram_tsv())?;
    println!(
        "{} words, {} word pairs -> {}",
        model.unigrams().len(),
        model.bigram_count(),
        args.out.display()
    );
    Ok(())
}

/// Lowercased `a`–`z` words; pairs are taken within sentences only.
pub fn count_text<'a>(texts: impl Iterator<Item = &'a str>, min_pair_count: u64) -> Result<NgramModel> {
    let mut words: BTreeMap<String, u64> = BTreeMap::new();
    let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
    for text in texts {
        let lowered = text.to_lowercase();
        for sentence in lowered.split(['.', '!', '?', ';', ':', '\n']) {
            let tokens: Vec<&str> = sentence
                .split(|c: char| !c.is_ascii_lowercase() && c != '\'')
                .filter(|w| !w.is_empty() && w.chars().all(|c| c.is_ascii_lowercase()))
                .collect();
            for w in &tokens {
                *words.entry(w.to_string()).or_default() += 1;
            }
            for pair in tokens.windows(2) {
                *pairs.entry((pair[0].to_string(), pair[1].to_string())).or_default() += 1;
            }
        }
    }
    let uni = words.iter().map(|(w, &c)| (w.as_str(), c));
    let bi = pairs
        .iter()
        .filter(|(_, &c)| c >= min_pair_count)
        .map(|((a, b), &c)| (a.as_str(), b.as_str(), c));
    Ok(NgramModel::build(uni, bi)?)
}

pub fn stats(common: &Common, out: &mut dyn Write) -> Result<()> {
    let (id, model) = common.model()?;
    writeln!(out, "corpus {id}: {} words, {} word pairs", model.unigrams().len(), model.bigram_count())?;
    let freq = model.letter_frequencies();
    let ranking = model.letter_ranking();
    writeln!(out, "letter ranking: {}", ranking.iter().collect::<String>())?;
    for c in &ranking {
        writeln!(out, "  {c} {}", freq[(*c as u8 - b'a') as usize])?;
    }
    match Arrangement::from_ranking(&ranking) {
        Ok(a) => writeln!(out, "arrangement: {}", a.spec_string())?,
        Err(e) => writeln!(out, "arrangement: unavailable ({e})")?,
    }
    Ok(())
}
