// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::path::PathBuf;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pfc_core::compile::compile_to_pf;
use pfc_core::pf::{pf_load, time_ordering, BranchString, PFDiagram, PFOp, PFViolation, Port, ThetaAnnotation};
use pfc_core::semantics::{apply_channel, branch_operator, run_procedure, DenseMap, EvalConfig};
use pfc_core::testing::flow_bearing_corpus;
use pfc_core::{Error, Phase};

fn corpus_file(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    std::fs::read_to_string(p).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_state(rng: &mut ChaCha8Rng, wires: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1 << wires).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= n);
    v
}

#[test]
fn corpus_procedures_load() {
    let bad = pf_load(&corpus_file("nonrunnable.pf.json")).unwrap();
    assert!(time_ordering(&bad).is_none());
    let cycle = bad.dependency_cycle().unwrap();
    assert!(cycle.contains(&"u".to_string()) && cycle.contains(&"w".to_string()));

    let good = pf_load(&corpus_file("runnable.pf.json")).unwrap();
    let t = time_ordering(&good).unwrap();
    assert_eq!(t.layers().len(), 2);
    assert!(t.t["w"] < t.t["u"]);
}

#[test]
fn non_runnable_refuses_to_run() {
    let bad = pf_load(&corpus_file("nonrunnable.pf.json")).unwrap();
    let input = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    assert!(matches!(run_procedure(&bad, &input, &BranchString::new(), 0), Err(Error::NotRunnable(_))));
}

#[test]
fn structural_violations_are_reported() {
    let mut d = PFDiagram::new();
    d.add_node("a", PFOp::RotV(ThetaAnnotation::constant(Phase::new(1, 4))));
    d.add_input("x", Port::new("a", 0));
    d.add_output("x", Port::new("a", 0));
    d.connect(Port::new("a", 0), Port::new("ghost", 0));
    let v = d.validate().violations;
    assert!(v.contains(&PFViolation::DuplicateWire("x".into())));
    assert!(v.iter().any(|e| matches!(e, PFViolation::UnknownNode(n) if n == "ghost")));

    let mut d = PFDiagram::new();
    let mut a = ThetaAnnotation::constant(Phase::ZERO);
    a.shift_set.insert("nowhere".into());
    d.add_node("r", PFOp::RotH(a));
    d.add_input("i", Port::new("r", 0));
    d.add_output("o", Port::new("r", 0));
    assert!(d
        .validate()
        .violations
        .iter()
        .any(|e| matches!(e, PFViolation::UndeclaredBit { bit, .. } if bit == "nowhere")));

    let mut d = PFDiagram::new();
    d.add_node("s", PFOp::SplitV);
    d.add_input("i", Port::new("s", 0));
    d.add_output("o", Port::new("s", 0));
    assert!(d.validate().violations.iter().any(|e| matches!(e, PFViolation::Arity { .. })));
}

#[test]
fn external_bits_must_be_supplied() {
    let mut d = PFDiagram::new();
    let mut a = ThetaAnnotation::constant(Phase::ZERO);
    a.sign_set.insert("ext".into());
    d.bits.insert("ext".into());
    d.add_node("r", PFOp::RotV(a));
    d.add_input("i", Port::new("r", 0));
    d.add_output("o", Port::new("r", 0));
    let input = [c(1.0, 0.0), c(0.0, 0.0)];
    assert!(matches!(run_procedure(&d, &input, &BranchString::new(), 0), Err(Error::MissingBit(_))));
    let r = BranchString::from([("ext".to_string(), true)]);
    assert!(run_procedure(&d, &input, &r, 0).is_ok());
}

#[test]
fn runs_follow_their_branch_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut ran = 0;
    for entry in flow_bearing_corpus(3, 25, 6, 3) {
        let (pf, _) = compile_to_pf(&entry.graph, &entry.flow).unwrap();
        let input = random_state(&mut rng, pf.inputs.len());
        let run = match run_procedure(&pf, &input, &BranchString::new(), rng.gen()) {
            Ok(r) => r,
            Err(Error::NormCollapse(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let k = branch_operator(&pf, &run.outcomes, &BranchString::new()).unwrap();
        let mut expect: Vec<Complex64> = (0..k.rows())
            .map(|i| (0..k.cols()).map(|j| k.get(i, j) * input[j]).sum())
            .collect();
        let n = expect.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(n > 1e-9);
        expect.iter_mut().for_each(|a| *a /= n);
        let overlap: Complex64 = expect.iter().zip(&run.state).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9, "overlap {overlap}");
        ran += 1;
    }
    assert!(ran >= 20, "{ran}");
}

#[test]
fn compiled_procedures_preserve_trace() {
    for entry in flow_bearing_corpus(4, 15, 5, 3) {
        let (pf, _) = compile_to_pf(&entry.graph, &entry.flow).unwrap();
        let dim = 1 << pf.inputs.len();
        let mut rho = DenseMap::identity(pf.inputs.len());
        rho = rho.scale(c(1.0 / dim as f64, 0.0));
        let out = apply_channel(&pf, &rho, &BranchString::new(), EvalConfig::default()).unwrap();
        assert!((out.trace() - c(1.0, 0.0)).norm() < 1e-9, "trace {}", out.trace());
    }
}
