//! Small labeled tensor-product Hilbert spaces: states, sparse operators and
//! projective measurement.

mod fold;
mod measure;
mod op;
mod spec;
mod state;

pub use fold::fold_environment;
pub(crate) use fold::gauge;
pub use measure::{
    computational_basis, fidelity, fidelity_with_rest, measure_projective, project_branch,
    reduced_fidelity, reorder, Branch, Measurement,
};
pub use op::{apply, LinearOp};
pub use spec::{level, SpecBuilder, Subsystem, SubsystemKind, SubsystemSpec};
pub use state::{make_state, norm_squared, StateVector};

#[cfg(test)]
mod tests {
    use num_complex::Complex64 as C;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::Error;

    fn two_atoms() -> SubsystemSpec {
        SubsystemSpec::builder()
            .atom("1")
            .atom("2")
            .build()
            .unwrap()
    }

    #[test]
    fn make_state_examples() {
        let spec = SubsystemSpec::builder()
            .atom("atom1")
            .cavity("cav")
            .build()
            .unwrap();
        let s: StateVector<f64> = make_state(spec.clone(), &[("atom1", 0), ("cav", 0)]).unwrap();
        assert_eq!(s.amplitudes()[0], C::new(1.0, 0.0));
        assert_eq!(s.norm_squared(), 1.0);

        let r: StateVector<f64> = make_state(
            SubsystemSpec::builder().atom("atom1").build().unwrap(),
            &[("atom1", 2)],
        )
        .unwrap();
        assert_eq!(r.amplitudes()[2], C::new(1.0, 0.0));

        let spec3 = SubsystemSpec::builder()
            .atom("atom1")
            .atom("atom2")
            .cavity("cav")
            .build()
            .unwrap();
        let s3: StateVector<f64> =
            make_state(spec3.clone(), &[("atom1", 1), ("atom2", 2), ("cav", 0)]).unwrap();
        assert_eq!(s3.amplitudes()[spec3.compose(&[1, 2, 0])], C::new(1.0, 0.0));
    }

    #[test]
    fn make_state_errors() {
        let spec = two_atoms();
        assert_eq!(
            make_state::<f64>(spec.clone(), &[("1", 0), ("x", 0)]).unwrap_err(),
            Error::UnknownLabel("x".into())
        );
        assert!(matches!(
            make_state::<f64>(spec.clone(), &[("1", 3), ("2", 0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            make_state::<f64>(spec, &[("1", 0)]),
            Err(Error::MissingAssignment(_))
        ));
    }

    #[test]
    fn apply_examples() {
        let spec = two_atoms();
        let s: StateVector<f64> = make_state(spec.clone(), &[("1", 1), ("2", 2)]).unwrap();
        let id = LinearOp::identity(&spec, &["2"]).unwrap();
        assert_eq!(id.apply(&s).unwrap(), s);
        let z = LinearOp::<f64>::zero(&spec, &["1", "2"]).unwrap();
        assert_eq!(z.apply(&s).unwrap().norm_squared(), 0.0);
        let lower = LinearOp::outer(&spec, "2", level::ONE, level::R).unwrap();
        let out = lower.apply(&s).unwrap();
        assert_eq!(out, make_state(spec, &[("1", 1), ("2", 1)]).unwrap());
    }

    #[test]
    fn apply_rejects_foreign_spec() {
        let s: StateVector<f64> = make_state(two_atoms(), &[("1", 0), ("2", 0)]).unwrap();
        let other = SubsystemSpec::builder().atom("1").build().unwrap();
        let op = LinearOp::<f64>::identity(&other, &["1"]).unwrap();
        assert!(matches!(op.apply(&s), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn measurement_examples() {
        let spec = SubsystemSpec::builder().atom("R").build().unwrap();
        let s: StateVector<f64> = make_state(spec, &[("R", 0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (k, post, p) = measure_projective(&s, "R", computational_basis(3), &mut rng).unwrap();
        assert_eq!((k, p), (0, 1.0));
        assert_eq!(post, s);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let spec = SubsystemSpec::builder().atom("a").build().unwrap();
        let plus = StateVector::from_amplitudes(
            spec,
            vec![C::new(h, 0.0), C::new(h, 0.0), C::new(0.0, 0.0)],
        )
        .unwrap();
        let basis = vec![
            vec![C::new(h, 0.0), C::new(h, 0.0), C::new(0.0, 0.0)],
            vec![C::new(h, 0.0), C::new(-h, 0.0), C::new(0.0, 0.0)],
            vec![C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ];
        let (k, _, p) = measure_projective(&plus, "a", basis, &mut rng).unwrap();
        assert_eq!(k, 0);
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn born_rule_branch_weights() {
        let spec = two_atoms();
        let (a, b) = (0.6, 0.8);
        let s = make_state::<f64>(spec.clone(), &[("1", 0), ("2", 1)])
            .unwrap()
            .scaled(C::new(a, 0.0))
            .add(
                &make_state(spec, &[("1", 1), ("2", 0)])
                    .unwrap()
                    .scaled(C::new(b, 0.0)),
            )
            .unwrap();
        let branches = project_branch(&s, "1", computational_basis(3)).unwrap();
        assert!((branches[0].weight - a * a).abs() < 1e-15);
        assert!((branches[1].weight - b * b).abs() < 1e-15);
        assert_eq!(branches[2].weight, 0.0);
    }

    #[test]
    fn measurement_errors() {
        let spec = SubsystemSpec::builder().atom("a").build().unwrap();
        let zero = StateVector::<f64>::zero(spec.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            measure_projective(&zero, "a", computational_basis(3), &mut rng).unwrap_err(),
            Error::ZeroNorm
        );
        let s = make_state::<f64>(spec, &[("a", 0)]).unwrap();
        let skew = vec![
            vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)],
            vec![C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)],
            vec![C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ];
        assert!(matches!(
            measure_projective(&s, "a", skew, &mut rng),
            Err(Error::NonOrthonormalBasis(_))
        ));
    }

    #[test]
    fn fidelity_examples() {
        let spec = two_atoms();
        let s00 = make_state::<f64>(spec.clone(), &[("1", 0), ("2", 0)]).unwrap();
        let s11 = make_state::<f64>(spec.clone(), &[("1", 1), ("2", 1)]).unwrap();
        assert_eq!(fidelity(&s00, &s00).unwrap(), 1.0);
        assert_eq!(fidelity(&s00, &s11).unwrap(), 0.0);
        let bell = s00.add(&s11).unwrap().normalized().unwrap();
        assert!((fidelity(&bell, &s00).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reduced_fidelity_traces_out_environment() {
        let full = SubsystemSpec::builder()
            .atom("1")
            .register("e", 2)
            .build()
            .unwrap();
        let sub = SubsystemSpec::builder().atom("1").build().unwrap();
        // |0>|e0> + |1>|e1>: reduced state is maximally mixed on {0,1}
        let s = make_state::<f64>(full.clone(), &[("1", 0), ("e", 0)])
            .unwrap()
            .add(&make_state(full.clone(), &[("1", 1), ("e", 1)]).unwrap())
            .unwrap();
        let t = make_state::<f64>(sub.clone(), &[("1", 0)]).unwrap();
        assert!((reduced_fidelity(&s, &t).unwrap() - 0.5).abs() < 1e-15);
        // product with environment: fidelity 1
        let p = make_state::<f64>(full, &[("1", 1), ("e", 1)]).unwrap();
        let t1 = make_state::<f64>(sub, &[("1", 1)]).unwrap();
        assert!((reduced_fidelity(&p, &t1).unwrap() - 1.0).abs() < 1e-15);
    }
}
