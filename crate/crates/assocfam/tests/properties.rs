//! Property-based invariants: jet arithmetic laws, rotation-law identities,
//! and the f_theta norm constraint over randomized inputs.

use assocfam::family::{rotate_shape, rotate_structure_field, solve_f_theta, FamilyLaw, FThetaMode};
use assocfam::jet::{Elementary, Jet2};
use assocfam::linalg::{g_dot, mat2_inv, mat2_mul};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    (-2.0..2.0f64).prop_filter("finite", |x| x.is_finite())
}

fn jet_from(coeffs: [f64; 10]) -> Jet2 {
    let mut j = Jet2::constant(coeffs[0], 3);
    let mut idx = 1;
    for d in 1..=3usize {
        for jj in 0..=d {
            j.set_coeff(d - jj, jj, coeffs[idx]);
            idx += 1;
        }
    }
    j
}

proptest! {
    /// Product rule: d/du of a product matches the Leibniz combination of
    /// the factors' values and derivatives.
    #[test]
    fn jet_product_rule(a in prop::array::uniform10(coeff()), b in prop::array::uniform10(coeff())) {
        let ja = jet_from(a);
        let jb = jet_from(b);
        let prod = ja * jb;
        let lhs = prod.partial(1, 0);
        let rhs = ja.partial(1, 0) * jb.value() + ja.value() * jb.partial(1, 0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        let lhs_v = prod.partial(0, 1);
        let rhs_v = ja.partial(0, 1) * jb.value() + ja.value() * jb.partial(0, 1);
        prop_assert!((lhs_v - rhs_v).abs() <= 1e-12 * (1.0 + lhs_v.abs()));
    }

    /// Multiplication is commutative and bilinear at every coefficient.
    #[test]
    fn jet_mul_commutes(a in prop::array::uniform10(coeff()), b in prop::array::uniform10(coeff())) {
        let ja = jet_from(a);
        let jb = jet_from(b);
        let ab = ja * jb;
        let ba = jb * ja;
        for d in 0..=3usize {
            for jj in 0..=d {
                prop_assert!((ab.coeff(d - jj, jj) - ba.coeff(d - jj, jj)).abs() <= 1e-12);
            }
        }
    }

    /// Chain rule through an elementary lift: cos(a)^2 equals the half-angle
    /// composite (1 + cos(2a)) / 2 as jets.
    #[test]
    fn jet_chain_rule(a in prop::array::uniform10(coeff())) {
        let ja = jet_from(a);
        let c = Jet2::lift(Elementary::Cos, &ja).unwrap();
        let direct = c * c;
        let composite = (Jet2::lift(Elementary::Cos, &(ja * 2.0)).unwrap() + 1.0) * 0.5;
        for d in 0..=3usize {
            for jj in 0..=d {
                let x = direct.coeff(d - jj, jj);
                let y = composite.coeff(d - jj, jj);
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs())), "coeff ({},{jj})", d - jj);
            }
        }
    }

    /// det A_theta = F1^2 det A + (F2^2 - F1^2) H^2 and tr A_theta = 2 F2 H
    /// for random metrics, operators and laws.
    #[test]
    fn rotation_lemma_identities(
        g11 in 0.5..2.5f64,
        g22 in 0.5..2.5f64,
        gr in -0.8..0.8f64,
        s00 in -1.5..1.5f64,
        s01 in -1.5..1.5f64,
        s11 in -1.5..1.5f64,
        theta in -3.0..3.0f64,
        c1 in -0.4..0.4f64,
        c2 in -0.4..0.4f64,
    ) {
        let g12 = gr * (g11 * g22).sqrt() * 0.5;
        let g = [[g11, g12], [g12, g22]];
        let a = mat2_mul(&mat2_inv(&g), &[[s00, s01], [s01, s11]]);
        let h = 0.5 * (a[0][0] + a[1][1]);
        let det = g11 * g22 - g12 * g12;
        let sq = det.sqrt();
        let jmat = [[-g12 / sq, -g22 / sq], [g11 / sq, g12 / sq]];
        let law = FamilyLaw::custom(
            &format!("1 + {c1}*theta"),
            &format!("1 + {c2}*theta"),
            "cos(2*theta)",
            "-sin(2*theta)",
        ).unwrap();
        let (f1, f2, _, _) = law.values(theta);
        let at = rotate_shape(&a, h, &jmat, theta, &law);
        let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let det_at = at[0][0] * at[1][1] - at[0][1] * at[1][0];
        prop_assert!((det_at - (f1 * f1 * det_a + (f2 * f2 - f1 * f1) * h * h)).abs() <= 1e-10);
        prop_assert!((0.5 * (at[0][0] + at[1][1]) - f2 * h).abs() <= 1e-12);
        // g-self-adjointness is preserved: g A_theta is symmetric.
        let gat = mat2_mul(&g, &at);
        prop_assert!((gat[0][1] - gat[1][0]).abs() <= 1e-10);
    }

    /// The f_theta constraint: |T_theta|^2 + f_theta^2 = 1 after the solve,
    /// whenever the radicand admits a real solution.
    #[test]
    fn f_theta_norm_constraint(
        tnorm in 0.0..0.999f64,
        dir in 0.0..std::f64::consts::TAU,
        shrink in 0.0..1.0f64,
        theta in 0.01..3.0f64,
    ) {
        let f = (1.0 - tnorm * tnorm).sqrt();
        let t = [tnorm * dir.cos(), tnorm * dir.sin()];
        let g = [[1.0, 0.0], [0.0, 1.0]];
        let jmat = [[0.0, -1.0], [1.0, 0.0]];
        // Admissible: |z_theta| <= 1 for all theta.
        let law = FamilyLaw::custom(
            "1",
            "1",
            &format!("(1 - {shrink}*sin(theta)*sin(theta))*cos(2*theta)"),
            &format!("-(1 - {shrink}*sin(theta)*sin(theta))*sin(2*theta)"),
        ).unwrap();
        let t_theta = rotate_structure_field(&t, &jmat, theta, &law);
        let f_theta = solve_f_theta(f, theta, &law, FThetaMode::Homogeneous, 1.0).unwrap();
        let n = g_dot(&g, &t_theta, &t_theta) + f_theta * f_theta;
        prop_assert!((n - 1.0).abs() <= 1e-12, "constraint broke: {n}");
    }

    /// Warped variant with eps = -1, eps3 = -1: |T|^2 + eps3 f^2 = eps.
    #[test]
    fn f_theta_warped_constraint(
        f0 in 1.0..1.8f64,
        theta in 0.01..2.0f64,
        shrink in 0.0..0.9f64,
    ) {
        // eps = -1, eps3 = -1: |T|^2 = eps3 f^2 + eps = f^2 - 1 >= 0.
        let tnorm = (f0 * f0 - 1.0).sqrt();
        let law = FamilyLaw::custom(
            "1",
            "1",
            &format!("(1 - {shrink}*sin(theta)*sin(theta))*cos(2*theta)"),
            &format!("-(1 - {shrink}*sin(theta)*sin(theta))*sin(2*theta)"),
        ).unwrap();
        let (_, _, lam, mu) = law.values(theta);
        let s = lam * lam + mu * mu;
        let f_theta = solve_f_theta(f0, theta, &law, FThetaMode::Warped { eps: -1.0, eps3: -1.0 }, 1.0).unwrap();
        // |T_theta|^2 = s |T|^2 must pair with f_theta to keep the constraint.
        let n = s * tnorm * tnorm - f_theta * f_theta;
        prop_assert!((n + 1.0).abs() <= 1e-11, "constraint broke: {n}");
    }

    /// The oriented g-rotation squares to -1 and preserves g for random SPD
    /// metrics.
    #[test]
    fn g_rotation_properties(
        g11 in 0.5..2.5f64,
        g22 in 0.5..2.5f64,
        gr in -0.8..0.8f64,
    ) {
        let g12 = gr * (g11 * g22).sqrt() * 0.5;
        let g = [[g11, g12], [g12, g22]];
        let det = g11 * g22 - g12 * g12;
        let sq = det.sqrt();
        let jm = [[-g12 / sq, -g22 / sq], [g11 / sq, g12 / sq]];
        let j2 = mat2_mul(&jm, &jm);
        prop_assert!((j2[0][0] + 1.0).abs() <= 1e-12);
        prop_assert!((j2[1][1] + 1.0).abs() <= 1e-12);
        prop_assert!(j2[0][1].abs() <= 1e-12 && j2[1][0].abs() <= 1e-12);
        let x = [1.0, 0.0];
        let jx = [jm[0][0], jm[1][0]];
        prop_assert!((g_dot(&g, &jx, &jx) - g_dot(&g, &x, &x)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Structure-equation residuals of graphs in a Berger-type space stay at
    /// rounding level for random quadratic height functions.
    #[test]
    fn random_graphs_pass_residual_suite(
        p in -0.2..0.2f64,
        q in -0.2..0.2f64,
        r in -0.2..0.2f64,
    ) {
        let imm = assocfam::catalog::make_surface_with(
            "graph",
            Some("E(1,0.3)"),
            &[("phi".to_string(), format!("{p}*u*u + {q}*u*v + {r}*v*v"))],
        ).unwrap();
        let report = assocfam::compat::residual_grid(
            &imm,
            &assocfam::surface::GridSpec::new(7, 7, 0.05),
            1e-8,
        );
        prop_assert!(report.pass, "{:?}", report.equations);
    }
}
