//! The worked-example corpus. Each fixture pairs a scenario file with
//! expected quantities; the `fixtures` command and the acceptance suite
//! recompute everything and diff. Every expected value carries a note saying
//! where it comes from.

use crate::capacity;
use crate::court;
use crate::error::{KitError, Result};
use crate::partition;
use crate::scenario::{parse_scenario_str, Scenario};
use crate::value::{eq_within, parse_rat};

pub struct Expectation {
    pub key: &'static str,
    pub value: &'static str,
    pub note: &'static str,
}

pub struct Fixture {
    pub name: &'static str,
    pub scenario_json: &'static str,
    pub note: &'static str,
    pub expect: &'static [Expectation],
}

macro_rules! expect {
    ($($key:literal => $value:literal ; $note:literal),* $(,)?) => {
        &[$(Expectation { key: $key, value: $value, note: $note }),*]
    };
}

pub fn corpus() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "xj",
            scenario_json: include_str!("../fixtures/xj.json"),
            note: "two users: two fresh bits vs one indexed bit; omniscience costs 2 while one \
                   public bit already unlocks the full key rate",
            expect: expect![
                "C_S" => "1" ; "mutual information of the two observations",
                "rho" => "2" ; "each side must cover the other's conditional entropy 1 + 1",
                "R_CO" => "2" ; "rho + rho_bar with no wiretapped users",
                "I" => "1" ; "two-user partition information",
                "P*" => "[[1],[2]]" ; "only partition of a pair",
                "verdict" => "OO_SUBOPTIMAL" ; "two-user rule: R_CO > 0",
                "condition:pro-two-user" => "FAIL" ; "R_CO = 2 is nonzero",
                "condition:cor-ub-s" => "FAIL" ; "silencing user 1 keeps the capacity but drops H(Z_2) to 2 < 3",
            ],
        },
        Fixture {
            name: "xor-triple",
            scenario_json: include_str!("../fixtures/xor-triple.json"),
            note: "three users with pairwise-independent XOR structure; every user is a function \
                   of the other two",
            expect: expect![
                "C_S" => "1/2" ; "half the total correlation of three dependent bits",
                "R_CO" => "3/2" ; "H(Z_V) - I(Z_V) = 2 - 1/2",
                "I" => "1/2" ; "singleton partition: (1+1+1-2)/2",
                "P*" => "[[1],[2],[3]]" ; "singletons are the unique finest optimizer",
                "verdict" => "OO_OPTIMAL" ; "every block is determined by its complement",
                "condition:thm-oo-no-helper" => "PASS" ; "all three conditional entropies vanish",
                "lower" => "3/2" ; "dual total correlation 2 minus I = 1/2",
            ],
        },
        Fixture {
            name: "chain-relay-pair",
            scenario_json: include_str!("../fixtures/chain-relay-pair.json"),
            note: "two active users sharing both chain edges, helper 1 trusted, relay 3 \
                   wiretapped; nothing needs to be said",
            expect: expect![
                "C_S" => "1" ; "edge a survives conditioning on the wiretapped relay",
                "rho" => "0" ; "both active users already hold the whole retained source",
                "rho_bar" => "0" ; "the relay's source is already known to both",
                "R_CO" => "0" ; "omniscience holds at the outset",
                "verdict" => "OO_OPTIMAL" ; "zero omniscience rate is unbeatable",
            ],
        },
        Fixture {
            name: "chain-three-active",
            scenario_json: include_str!("../fixtures/chain-three-active.json"),
            note: "user 1 misses the second chain edge, so omniscience must spend a bit on the \
                   wiretapped relay even though the key never uses it",
            expect: expect![
                "C_S" => "1" ; "still the surviving private edge",
                "rho" => "0" ; "trusted users cover each other",
                "rho_bar" => "1" ; "user 1 can only learn the relay's bit from the relay",
                "R_CO" => "1" ; "rho + rho_bar",
                "verdict" => "OO_SUBOPTIMAL" ; "dropping wiretapped edges shows R_S = 0",
                "upper" => "0" ; "omniscience rate of the wiretap-reduced scenario",
            ],
        },
        Fixture {
            name: "hyp5",
            scenario_json: include_str!("../fixtures/hyp5.json"),
            note: "five users, three edges, every edge crosses the finest optimal partition",
            expect: expect![
                "C_S" => "1" ; "partition {1|2|3|45} attains the minimum",
                "I" => "1" ; "same minimization",
                "P*" => "[[1],[2],[3],[4,5]]" ; "meet of all optimizers",
                "R_CO" => "2" ; "H(Z_V) - I = 3 - 1",
                "J_W(P*)" => "3" ; "all three edges cross",
                "lower" => "2" ; "crossing weight 3 minus I = 1",
                "verdict" => "OO_OPTIMAL" ; "crossing condition decides",
                "evidence:thm-hyp-iff" => "2" ; "discussion rate pinned at rho",
            ],
        },
        Fixture {
            name: "slack",
            scenario_json: include_str!("../fixtures/slack.json"),
            note: "a doubled edge hides inside the block {2,3}; the crossing bound collapses to \
                   zero but the edge inside the block disproves optimality",
            expect: expect![
                "C_S" => "1" ; "partition {1|23}",
                "I" => "1" ; "same value",
                "P*" => "[[1],[2,3]]" ; "finest optimizer",
                "R_CO" => "2" ; "H - I = 3 - 1",
                "J_W(P*)" => "1" ; "only edge a crosses",
                "lower" => "0" ; "crossing weight 1 minus I = 1",
                "verdict" => "OO_SUBOPTIMAL" ; "edge b sits inside block {2,3}",
            ],
        },
        Fixture {
            name: "pin-nc-1",
            scenario_json: include_str!("../fixtures/pin-nc-1.json"),
            note: "slack source with both end users silent; the binding silent user leaves the \
                   doubled edge unprotected",
            expect: expect![
                "C_S" => "1" ; "alpha with a single vocal user",
                "alpha" => "1" ; "min over silent users of their information with user 2",
                "S*" => "[1]" ; "user 1 attains the minimum",
                "branch" => "|V\\S|=1" ; "one vocal user remains",
                "R_CO" => "2" ; "H(Z_2) - alpha = 3 - 1",
                "verdict" => "OO_SUBOPTIMAL" ; "edges b, c miss the binding silent user",
            ],
        },
        Fixture {
            name: "pin-nc-2",
            scenario_json: include_str!("../fixtures/pin-nc-2.json"),
            note: "slack source with user 1 wiretapped; dropping the wiretapped edge removes all \
                   need for discussion while omniscience still pays for user 1",
            expect: expect![
                "C_S" => "2" ; "I(Z_2 and Z_3 | Z_1): both shared edges survive",
                "rho" => "0" ; "users 2 and 3 hold identical retained sources",
                "rho_bar" => "1" ; "user 3 alone cannot reconstruct the wiretapped bit",
                "R_CO" => "1" ; "rho + rho_bar",
                "plan_upper" => "0" ; "deterministic edge-drop plan reaches omniscience silently",
                "upper" => "0" ; "reduced scenario needs no discussion",
                "verdict" => "OO_SUBOPTIMAL" ; "0 < R_CO",
            ],
        },
        Fixture {
            name: "ubsl1",
            scenario_json: include_str!("../fixtures/ubsl1.json"),
            note: "four-user ring with a doubled edge; removing one copy of the doubled edge \
                   half the time trims omniscience without hurting the key rate",
            expect: expect![
                "C_S" => "3/2" ; "partition {12|3|4}",
                "I" => "3/2" ; "same minimization",
                "P*" => "[[1,2],[3],[4]]" ; "unique optimizer",
                "R_CO" => "7/2" ; "H - I = 5 - 3/2",
                "plan_upper" => "3" ; "mixed-block omniscience: 9/2 - 3/2",
                "lower" => "3/2" ; "crossing weight 3 minus I",
                "verdict" => "OO_SUBOPTIMAL" ; "3 < 7/2",
            ],
        },
        Fixture {
            name: "ubsl2",
            scenario_json: include_str!("../fixtures/ubsl2.json"),
            note: "index-bit pair source where collapsing user 1's agreeing outcomes saves half \
                   a bit of omniscience",
            expect: expect![
                "C_S" => "1" ; "partition minimization over the table",
                "I" => "1" ; "singletons and {12|3} tie",
                "P*" => "[[1],[2],[3]]" ; "meet of the tied optimizers",
                "R_CO" => "2" ; "H - I = 3 - 1",
                "plan_upper" => "3/2" ; "processed omniscience 5/2 - 1",
                "lower" => "3/2" ; "dual total correlation 5/2 minus I",
                "upper" => "3/2" ; "the plan's omniscience rate",
                "verdict" => "OO_SUBOPTIMAL" ; "3/2 < 2",
            ],
        },
        Fixture {
            name: "pin3",
            scenario_json: include_str!("../fixtures/pin3.json"),
            note: "two-edge path with the middle user as helper; the support family is too rigid \
                   for the fractional bound to bite",
            expect: expect![
                "C_S" => "1" ; "fractional-partition optimum",
                "frac_opt" => "1" ; "maximum weighted conditional entropy 1 below H = 2",
                "support_union" => "[[1],[1,2],[3],[2,3]]" ; "the two extreme optima combined",
                "R_CO" => "1" ; "rho alone",
                "lower" => "0" ; "every feasible fractional partition gives I_lambda = 1",
                "verdict" => "UNDECIDED" ; "no decisive route at desk scale",
            ],
        },
        Fixture {
            name: "expins-s3",
            scenario_json: include_str!("../fixtures/expins-s3.json"),
            note: "path source, far end silent: the binding information equals the vocal pool's",
            expect: expect![
                "C_S" => "1" ; "min(alpha, vocal information)",
                "alpha" => "1" ; "I(Z_{12} and Z_3)",
                "S*" => "[3]" ; "the only silent user",
                "branch" => "I=alpha" ; "tie branch",
                "R_CO" => "1" ; "H(Z_{12}) - C_S = 2 - 1",
                "verdict" => "OO_OPTIMAL" ; "augmented-partition condition holds",
                "evidence:thm-hyp-silent-iff-3" => "1" ; "rate pinned at rho",
            ],
        },
        Fixture {
            name: "expins-s2",
            scenario_json: include_str!("../fixtures/expins-s2.json"),
            note: "path source, middle user silent: the ends share nothing, capacity dies",
            expect: expect![
                "C_S" => "0" ; "independent vocal pool",
                "alpha" => "2" ; "the silent middle sees both edges",
                "S*" => "[2]" ; "only silent user",
                "branch" => "I<alpha" ; "vocal information 0",
                "R_CO" => "2" ; "omniscience still swaps both edges",
                "verdict" => "OO_SUBOPTIMAL" ; "a zero-rate key needs no discussion",
            ],
        },
        Fixture {
            name: "expins-s13",
            scenario_json: include_str!("../fixtures/expins-s13.json"),
            note: "path source, both ends silent: user 2 already holds everything",
            expect: expect![
                "C_S" => "1" ; "alpha over the two silent users",
                "alpha" => "1" ; "both ends tie",
                "S*" => "[1,3]" ; "both attain alpha",
                "branch" => "|V\\S|=1" ; "single vocal user",
                "R_CO" => "1" ; "H(Z_2) - 1",
                "verdict" => "OO_OPTIMAL" ; "user 2 determines the vocal pool given S*",
                "evidence:thm-hyp-silent-iff-2" => "1" ; "rate pinned at rho",
            ],
        },
        Fixture {
            name: "fls",
            scenario_json: include_str!("../fixtures/fls.json"),
            note: "three active XOR users with the three seed bits held by helpers; a fractional \
                   cover with six quarter-weights is uniquely optimal",
            expect: expect![
                "C_S" => "3/4" ; "fractional-partition LP optimum",
                "frac_opt" => "3/4" ; "H = 3 minus best weighted sum 9/4",
                "support_union" => "[[2,3,4],[1,3,5],[1,2,6],[1,2,4,5,6],[1,3,4,5,6],[2,3,4,5,6]]" ;
                    "six sets carrying weight 1/4 in the unique optimum",
                "R_CO" => "9/4" ; "H - C_S",
                "condition:thm-oo-helpers" => "PASS" ; "half-weights on the six complements cover \
                    every user with zero conditional entropies",
                "lower" => "9/4" ; "I_lambda = H for the complement cover",
                "verdict" => "OO_OPTIMAL" ; "lower bound meets R_CO",
            ],
        },
        Fixture {
            name: "snn",
            scenario_json: include_str!("../fixtures/snn.json"),
            note: "five users where block {4,5} hides a private bit; every computable route \
                   leaves a gap (external converse arguments pin R_S = 3, outside this kit)",
            expect: expect![
                "C_S" => "1" ; "partition {1|2|3|45}",
                "I" => "1" ; "same minimization",
                "P*" => "[[1],[2],[3],[4,5]]" ; "meet of optimizers",
                "R_CO" => "3" ; "H - I = 4 - 1",
                "J_D(P*)" => "3" ; "4 minus the hidden bit of block {4,5}",
                "lower" => "2" ; "J_D - I = 3 - 1",
                "upper" => "3" ; "no plan supplied; R_CO caps the bracket",
                "condition:thm-oo-no-helper" => "FAIL" ; "H(Z_45 | Z_123) = 1 > 0",
                "verdict" => "UNDECIDED" ; "bracket [2, 3] stays open",
            ],
        },
        Fixture {
            name: "hyp4",
            scenario_json: include_str!("../fixtures/hyp4.json"),
            note: "silent path users plus a redundant helper copy of the shared edge; removing \
                   the determined helper exposes a decisive silent-branch check",
            expect: expect![
                "C_S" => "1" ; "alpha of the silent pair",
                "R_CO" => "1" ; "one bit of discussion for omniscience",
                "lower" => "1" ; "transferred from the helper-free scenario",
                "verdict" => "OO_OPTIMAL" ; "invariant transform plus decisive branch",
            ],
        },
    ]
}

pub struct Mismatch {
    pub key: String,
    pub expected: String,
    pub got: String,
}

/// Recompute every expected quantity for one fixture.
pub fn run_fixture(f: &Fixture) -> Result<Vec<Mismatch>> {
    let scn = parse_scenario_str(f.scenario_json)?;
    let report = court::analyze(&scn, &[], &[])?;
    let mut mismatches = Vec::new();
    for e in f.expect {
        let got = lookup(&scn, &report, e.key)?;
        let ok = match got {
            Looked::Number(ref r) => {
                let want = parse_rat(e.value)?;
                eq_within(r, &want, scn.is_exact())
            }
            Looked::Text(ref s) => s == e.value,
        };
        if !ok {
            mismatches.push(Mismatch {
                key: e.key.to_string(),
                expected: e.value.to_string(),
                got: match got {
                    Looked::Number(r) => r.to_string(),
                    Looked::Text(s) => s,
                },
            });
        }
    }
    Ok(mismatches)
}

enum Looked {
    Number(crate::value::Rat),
    Text(String),
}

fn lookup(scn: &Scenario, report: &court::AnalysisReport, key: &str) -> Result<Looked> {
    if let Some(tag) = key.strip_prefix("condition:") {
        let c = report
            .conditions
            .iter()
            .find(|c| c.tag == tag)
            .ok_or_else(|| KitError::Internal(format!("no condition {tag}")))?;
        return Ok(Looked::Text(c.status.label().to_string()));
    }
    if let Some(tag) = key.strip_prefix("evidence:") {
        let e = report
            .evidence
            .iter()
            .find(|e| e.tag == tag && e.value.is_some())
            .ok_or_else(|| KitError::Internal(format!("no valued evidence {tag}")))?;
        return Ok(Looked::Number(e.value.as_ref().unwrap().rat.clone()));
    }
    Ok(match key {
        "C_S" => Looked::Number(report.capacity.c_s.rat.clone()),
        "rho" => Looked::Number(report.capacity.rho.rat.clone()),
        "rho_bar" => Looked::Number(report.capacity.rho_bar.rat.clone()),
        "R_CO" => Looked::Number(report.capacity.r_co.rat.clone()),
        "lower" => Looked::Number(report.bracket.0.rat.clone()),
        "upper" => Looked::Number(report.bracket.1.rat.clone()),
        "verdict" => Looked::Text(report.verdict.label().to_string()),
        "I" | "P*" => {
            let o = scn.oracle().condition(scn.untrusted());
            let m = partition::mmi(&o, o.ground().full_mask(), 0)?;
            if key == "I" {
                Looked::Number(m.value)
            } else {
                Looked::Text(serde_json::to_string(&m.fundamental.to_ids(o.ground())).unwrap())
            }
        }
        "J_W(P*)" => {
            let crate::entropy::SourceModel::Hypergraph(h) = &scn.source else {
                return Err(KitError::Internal("J_W needs a hypergraph".into()));
            };
            let o = scn.oracle().condition(scn.untrusted());
            let m = partition::mmi(&o, o.ground().full_mask(), 0)?;
            let reduced = h.remove_edges_meeting(scn.untrusted()).restrict(o.ground().ids())?;
            let (jw, _) = court::jw_hypergraph(&reduced, &m.fundamental, o.ground().full_mask())?;
            Looked::Number(jw)
        }
        "J_D(P*)" => {
            let o = scn.oracle().condition(scn.untrusted());
            let m = partition::mmi(&o, o.ground().full_mask(), 0)?;
            let jd = court::jd_partition(
                &o,
                &court::BlockWeighting::Blocks(&m.fundamental),
                0,
            )?;
            Looked::Number(jd)
        }
        "alpha" | "S*" | "branch" => {
            let sc = capacity::alpha_and_sstar(scn)?;
            match key {
                "alpha" => Looked::Number(sc.alpha),
                "S*" => Looked::Text(
                    serde_json::to_string(&scn.ground().ids_of(sc.s_star)).unwrap(),
                ),
                _ => Looked::Text(sc.branch.label().to_string()),
            }
        }
        "frac_opt" | "support_union" => {
            let fr = capacity::capacity_fractional_lp(scn)?;
            if key == "frac_opt" {
                Looked::Number(fr.optimum)
            } else {
                let ids: Vec<Vec<u32>> =
                    fr.support_union.iter().map(|&b| scn.ground().ids_of(b)).collect();
                Looked::Text(serde_json::to_string(&ids).unwrap())
            }
        }
        "plan_upper" => {
            let e = report
                .evidence
                .iter()
                .find(|e| e.tag == "thm-ub-processing")
                .and_then(|e| e.value.as_ref())
                .ok_or_else(|| KitError::Internal("no processing bound in evidence".into()))?;
            Looked::Number(e.rat.clone())
        }
        other => return Err(KitError::Internal(format!("unknown expectation key {other:?}"))),
    })
}

pub struct FixtureOutcome {
    pub name: &'static str,
    pub mismatches: Vec<Mismatch>,
    pub error: Option<String>,
}

/// Run the whole corpus, one worker per fixture.
pub fn run_all() -> Vec<FixtureOutcome> {
    let fixtures = corpus();
    let mut outcomes: Vec<Option<FixtureOutcome>> = Vec::new();
    outcomes.resize_with(fixtures.len(), || None);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for f in &fixtures {
            handles.push(scope.spawn(move || match run_fixture(f) {
                Ok(mismatches) => FixtureOutcome { name: f.name, mismatches, error: None },
                Err(e) => FixtureOutcome {
                    name: f.name,
                    mismatches: Vec::new(),
                    error: Some(e.to_string()),
                },
            }));
        }
        for (slot, h) in outcomes.iter_mut().zip(handles) {
            *slot = Some(h.join().expect("fixture worker panicked"));
        }
    });
    outcomes.into_iter().map(|o| o.unwrap()).collect()
}
