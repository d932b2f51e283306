//! Instance generators and independent reference implementations shared by
//! the integration tests.
#![allow(dead_code)]

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use pbvote::{Ballot, Format, FormatParams, Instance, Profile, Project, ProjectId, ValuationProfile, VoterId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rat(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub struct Case {
    pub instance: Instance,
    pub profile: Profile,
    pub valuations: ValuationProfile,
}

/// Random election with up to `max_voters` voters and `max_projects`
/// projects, budget at most `max_budget`, every cost at most the budget and
/// ballots of a random format.
pub fn random_case(seed: u64, max_voters: usize, max_projects: usize, max_budget: u64) -> Case {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(1..=max_projects);
    let n = rng.random_range(1..=max_voters);
    let budget = rng.random_range(1..=max_budget);
    // small budgets make equal costs and exact price ties common
    let projects: Vec<Project> =
        (0..m).map(|j| Project::synthetic(format!("p{j:02}"), rng.random_range(1..=budget))).collect();
    let instance = Instance::new(projects, budget).expect("valid random instance");
    let format = Format::ALL[rng.random_range(0..Format::ALL.len())];
    let ids: Vec<ProjectId> = instance.projects().iter().map(|p| p.id.clone()).collect();
    let mut params = FormatParams::default();
    if format == Format::KApproval {
        params = FormatParams::k(rng.random_range(1..=m as u32));
    }
    if format == Format::ThresholdApproval {
        params = FormatParams::t(rng.random_range(1..=100));
    }
    let ballots = (0..n)
        .map(|i| (VoterId::new(format!("v{i:02}")), random_ballot(&mut rng, &instance, format, &params, &ids)))
        .collect();
    let profile = Profile::new(instance.clone(), format, params, ballots).expect("generated ballots are valid");
    let valuations = pbvote::derive_valuations(&profile).expect("valid profile");
    Case { instance, profile, valuations }
}

fn random_ballot(rng: &mut ChaCha8Rng, instance: &Instance, format: Format, params: &FormatParams, ids: &[ProjectId]) -> Ballot {
    let mut shuffled = ids.to_vec();
    shuffled.shuffle(rng);
    match format {
        Format::Points => {
            let take = rng.random_range(1..=shuffled.len());
            let mut left = 100u32;
            let mut alloc = Vec::new();
            for (i, id) in shuffled.into_iter().take(take).enumerate() {
                let pts = if i + 1 == take { left } else { rng.random_range(0..=left) };
                left -= pts;
                alloc.push((id, pts));
            }
            Ballot::Points(alloc)
        }
        Format::KApproval => {
            let k = params.k.expect("k set") as usize;
            let take = rng.random_range(0..=k);
            Ballot::KApproval(shuffled.into_iter().take(take).collect())
        }
        Format::ThresholdApproval => {
            let take = rng.random_range(0..=shuffled.len());
            Ballot::ThresholdApproval(shuffled.into_iter().take(take).collect())
        }
        Format::Knapsack => {
            let mut spent = 0;
            let mut chosen = Vec::new();
            for id in shuffled {
                let c = instance.project(&id).expect("known").cost;
                if spent + c <= instance.budget() && rng.random_bool(0.6) {
                    spent += c;
                    chosen.push(id);
                }
            }
            Ballot::Knapsack(chosen)
        }
        Format::Rank => Ballot::Rank(shuffled),
        Format::ValueForMoney => Ballot::ValueForMoney(shuffled),
    }
}

/// Greedy by total score: descending score, then ascending cost, then id.
pub fn greedy_oracle(instance: &Instance, valuations: &ValuationProfile) -> Vec<ProjectId> {
    let score = |j: usize| valuations.rows().iter().map(|r| r[j]).sum::<u64>();
    let mut order: Vec<usize> = (0..instance.len()).collect();
    order.sort_by_key(|&j| (std::cmp::Reverse(score(j)), instance.projects()[j].cost, instance.projects()[j].id.clone()));
    let mut left = instance.budget();
    order
        .into_iter()
        .filter(|&j| {
            let c = instance.projects()[j].cost;
            let fits = c <= left;
            if fits {
                left -= c;
            }
            fits
        })
        .map(|j| instance.projects()[j].id.clone())
        .collect()
}

/// Smallest `rho` with `sum_i min(b_i, rho * u_i) >= cost`, found by walking
/// the breakpoints `b_i / u_i` and interpolating on the last linear piece.
pub fn rho_by_breakpoints(cost: &BigRational, utilities: &[BigRational], budgets: &[BigRational]) -> Option<BigRational> {
    let f = |rho: &BigRational| -> BigRational {
        utilities
            .iter()
            .zip(budgets)
            .filter(|(u, _)| !u.is_zero())
            .map(|(u, b)| std::cmp::min(b.clone(), rho * u))
            .fold(BigRational::zero(), |a, x| a + x)
    };
    let mut points: Vec<BigRational> =
        utilities.iter().zip(budgets).filter(|(u, _)| !u.is_zero()).map(|(u, b)| b / u).collect();
    points.sort();
    points.dedup();
    let mut prev = BigRational::zero();
    for p in points {
        let fp = f(&p);
        if &fp >= cost {
            let fprev = f(&prev);
            if fp == fprev {
                return Some(prev);
            }
            return Some(&prev + (cost - &fprev) * (&p - &prev) / (fp - fprev));
        }
        prev = p;
    }
    None
}

/// Plain Equal Shares on utilities `v + epsilon`, without any completion step.
pub fn mes_epsilon_oracle(instance: &Instance, valuations: &ValuationProfile, epsilon: &BigRational) -> Vec<ProjectId> {
    let n = valuations.num_voters();
    let m = instance.len();
    let mut budgets = vec![rat(instance.budget()) / rat(n as u64); n];
    let utilities: Vec<Vec<BigRational>> =
        (0..m).map(|j| (0..n).map(|i| rat(valuations.value(i, j)) + epsilon).collect()).collect();
    let mut funded: Vec<usize> = Vec::new();
    loop {
        let mut best: Option<(usize, BigRational)> = None;
        for j in (0..m).filter(|j| !funded.contains(j)) {
            let p = &instance.projects()[j];
            let Some(rho) = rho_by_breakpoints(&rat(p.cost), &utilities[j], &budgets) else { continue };
            let better = match &best {
                None => true,
                Some((k, r)) => {
                    let q = &instance.projects()[*k];
                    match rho.cmp(r) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => (p.cost, &p.id) < (q.cost, &q.id),
                    }
                }
            };
            if better {
                best = Some((j, rho));
            }
        }
        let Some((j, rho)) = best else { break };
        for (b, u) in budgets.iter_mut().zip(&utilities[j]) {
            let pay = std::cmp::min(b.clone(), &rho * u);
            *b -= pay;
        }
        funded.push(j);
    }
    funded.into_iter().map(|j| instance.projects()[j].id.clone()).collect()
}

pub fn epsilon() -> BigRational {
    BigRational::one() / rat(1_000_000)
}

/// One ballot per format for each of `n` i.i.d. voters, all derived from the
/// same latent scores `popularity_j + noise_ij`.
pub fn exchangeable_profiles(instance: &Instance, n: usize, seed: u64) -> Vec<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = instance.len();
    let popularity: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
    let scores: Vec<Vec<f64>> =
        (0..n).map(|_| popularity.iter().map(|p| p + 0.8 * rng.random::<f64>()).collect()).collect();
    let id = |j: usize| instance.projects()[j].id.clone();
    let cost = |j: usize| instance.projects()[j].cost as f64;
    let by = |key: &dyn Fn(usize) -> f64| -> Vec<usize> {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
        order
    };
    let mut out = Vec::new();
    for format in Format::ALL {
        let params = match format {
            Format::KApproval => FormatParams::k(3),
            Format::ThresholdApproval => FormatParams::t(90),
            _ => FormatParams::default(),
        };
        let ballots = scores
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let ranked = by(&|j| s[j]);
                let ballot = match format {
                    Format::Points => Ballot::Points(ranked.iter().take(3).zip([50, 30, 20]).map(|(&j, p)| (id(j), p)).collect()),
                    Format::KApproval => Ballot::KApproval(ranked.iter().take(3).map(|&j| id(j)).collect()),
                    Format::ThresholdApproval => Ballot::ThresholdApproval(ranked.iter().filter(|&&j| s[j] > 0.9).map(|&j| id(j)).collect()),
                    Format::Knapsack => {
                        let mut left = instance.budget() as f64;
                        Ballot::Knapsack(
                            ranked
                                .iter()
                                .filter(|&&j| {
                                    let fits = cost(j) <= left;
                                    if fits {
                                        left -= cost(j);
                                    }
                                    fits
                                })
                                .map(|&j| id(j))
                                .collect(),
                        )
                    }
                    Format::Rank => Ballot::Rank(ranked.iter().map(|&j| id(j)).collect()),
                    Format::ValueForMoney => Ballot::ValueForMoney(by(&|j| s[j] / cost(j)).into_iter().map(id).collect()),
                };
                (VoterId::new(format!("v{i:03}")), ballot)
            })
            .collect();
        out.push(Profile::new(instance.clone(), format, params, ballots).expect("synthetic ballots are valid"));
    }
    out
}
