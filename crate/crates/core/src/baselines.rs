//! Directed-evolution simulations without a surrogate model.

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::landscape::{single_mutants, space_size, Landscape, ScreeningSession, Variant, ALPHABET};
use crate::trace::{RunTrace, TraceHeader};

/// Single-mutation walk: greedy coordinate ascent from `start`.
///
/// Each sweep visits the positions in a freshly shuffled order; at a position
/// all 19 substitutions of the current champion are screened (already
/// screened ones are skipped) and the champion becomes the best variant seen
/// so far. The walk ends when the budget is spent or a whole sweep screens
/// nothing new.
pub fn run_smw(landscape: &Landscape, start: &Variant, budget: usize, seed: u64) -> Result<RunTrace> {
    let header = TraceHeader::new(
        "smw",
        seed,
        serde_json::json!({ "budget": budget, "start": start.word() }),
    );
    let mut session = ScreeningSession::new(landscape, budget, header)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_fitness = session.screen(start)?;
    let mut champion = start.clone();
    let mut positions: Vec<usize> = (0..landscape.n()).collect();

    loop {
        positions.shuffle(&mut rng);
        let mut screened_in_sweep = 0;
        for &p in &positions {
            for mutant in single_mutants(&champion, p)? {
                if session.is_exhausted() {
                    return Ok(session.into_trace());
                }
                if session.is_screened(&mutant) {
                    continue;
                }
                let y = session.screen(&mutant)?;
                screened_in_sweep += 1;
                if y > best_fitness {
                    best_fitness = y;
                    champion = mutant;
                }
            }
        }
        if screened_in_sweep == 0 || session.is_exhausted() {
            return Ok(session.into_trace());
        }
    }
}

/// Screens all single mutants of `start`, then recombines the best residues.
///
/// For every position the `top_k` residues by single-mutant fitness are kept
/// (the start residue scores with the start's fitness). Their `top_k^n`
/// combinations are screened in descending order of summed single-mutant
/// fitness, ties by variant index, skipping anything already screened.
pub fn run_recombination(
    landscape: &Landscape,
    start: &Variant,
    budget: usize,
    top_k: usize,
    seed: u64,
) -> Result<RunTrace> {
    let n = landscape.n();
    let singles_stage = 1 + 19 * n;
    if budget < singles_stage {
        return Err(Error::InvalidInput(format!(
            "recombination needs a budget of at least {singles_stage}, got {budget}"
        )));
    }
    if top_k == 0 || top_k > ALPHABET.len() {
        return Err(Error::InvalidInput(format!("top_k must be in 1..=20, got {top_k}")));
    }
    let header = TraceHeader::new(
        "recombination",
        seed,
        serde_json::json!({ "budget": budget, "start": start.word(), "top_k": top_k }),
    );
    let mut session = ScreeningSession::new(landscape, budget, header)?;
    let start_fitness = session.screen(start)?;

    let mut scores = vec![[0.0f64; 20]; n];
    for (p, row) in scores.iter_mut().enumerate() {
        row[start.codes()[p] as usize] = start_fitness;
        for mutant in single_mutants(start, p)? {
            row[mutant.codes()[p] as usize] = session.screen(&mutant)?;
        }
    }

    let kept: Vec<Vec<u8>> = scores
        .iter()
        .map(|row| {
            let mut codes: Vec<u8> = (0..20).collect();
            codes.sort_by(|&a, &b| row[b as usize].total_cmp(&row[a as usize]).then(a.cmp(&b)));
            codes.truncate(top_k);
            codes
        })
        .collect();

    let mut combos: Vec<(f64, Variant)> = Vec::new();
    let mut counter = vec![0usize; n];
    loop {
        let codes: Vec<u8> = counter.iter().enumerate().map(|(p, &i)| kept[p][i]).collect();
        let score = codes
            .iter()
            .enumerate()
            .map(|(p, &c)| scores[p][c as usize])
            .sum();
        combos.push((score, Variant::from_codes(&codes)?));
        // odometer over the kept residues
        let mut p = n;
        let wrapped = loop {
            if p == 0 {
                break true;
            }
            p -= 1;
            counter[p] += 1;
            if counter[p] < top_k {
                break false;
            }
            counter[p] = 0;
        };
        if wrapped {
            break;
        }
    }
    combos.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));

    for (_, v) in combos {
        if session.is_exhausted() {
            break;
        }
        if !session.is_screened(&v) {
            session.screen(&v)?;
        }
    }
    Ok(session.into_trace())
}

/// Uniform random search without replacement over the `20^n` space.
pub fn run_random(landscape: &Landscape, budget: usize, seed: u64) -> Result<RunTrace> {
    let size = space_size(landscape.n())?;
    if budget as u64 > size {
        return Err(Error::InvalidInput(format!(
            "budget {budget} exceeds the {size} variants of the space"
        )));
    }
    let size = usize::try_from(size)
        .map_err(|_| Error::InvalidInput("variant space too large to sample".into()))?;
    let header = TraceHeader::new("random", seed, serde_json::json!({ "budget": budget }));
    let mut session = ScreeningSession::new(landscape, budget, header)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in index::sample(&mut rng, size, budget).iter() {
        session.screen(&Variant::from_index(i as u64, landscape.n())?)?;
    }
    Ok(session.into_trace())
}
