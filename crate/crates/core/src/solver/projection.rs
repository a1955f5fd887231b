use crate::scalar::Scalar;

/// `Σ w_i |z_i|`, with moduli for complex entries.
pub fn weighted_l1_norm<T: Scalar>(z: &[T], w: &[f64]) -> f64 {
    z.iter().zip(w).map(|(v, wi)| wi * v.modulus()).sum()
}

/// `max_i |g_i| / w_i`, the dual of [`weighted_l1_norm`].
pub fn weighted_dual_norm<T: Scalar>(g: &[T], w: &[f64]) -> f64 {
    g.iter()
        .zip(w)
        .map(|(v, wi)| v.modulus() / wi)
        .fold(0.0, f64::max)
}

/// Euclidean projection onto `{v : Σ w_i |v_i| ≤ τ}`.
///
/// Solves for the soft threshold θ by walking the sorted breakpoints
/// `|z_i| / w_i`; complex entries are shrunk in modulus with their phase kept.
/// Points whose norm exceeds τ only by summation rounding are returned
/// unchanged, which makes the projection idempotent bit for bit.
pub fn project_weighted_l1_ball<T: Scalar>(z: &[T], w: &[f64], tau: f64) -> Vec<T> {
    let mut out = z.to_vec();
    project_in_place(&mut out, w, tau);
    out
}

pub(crate) fn project_in_place<T: Scalar>(z: &mut [T], w: &[f64], tau: f64) {
    assert_eq!(z.len(), w.len(), "weight length mismatch");
    assert!(tau >= 0.0, "negative radius");
    debug_assert!(w.iter().all(|&v| v > 0.0));
    let norm = weighted_l1_norm(z, w);
    let slack = 2.0 * (z.len() as f64 + 4.0) * f64::EPSILON;
    if norm <= tau * (1.0 + slack) {
        return;
    }
    if tau == 0.0 {
        z.fill(T::zero());
        return;
    }
    let theta = threshold(z, w, tau);
    for (v, &wi) in z.iter_mut().zip(w) {
        let m = v.modulus();
        let shrunk = m - theta * wi;
        *v = if shrunk > 0.0 {
            v.scale(shrunk / m)
        } else {
            T::zero()
        };
    }
    // cancellation in |z_i| − θw_i can leave the result a few ulps outside
    let out = weighted_l1_norm(z, w);
    if out > tau * (1.0 + slack) {
        let c = tau / out;
        z.iter_mut().for_each(|v| *v = v.scale(c));
    }
}

fn threshold<T: Scalar>(z: &[T], w: &[f64], tau: f64) -> f64 {
    let mods: Vec<f64> = z.iter().map(|v| v.modulus()).collect();
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| (mods[b] / w[b]).total_cmp(&(mods[a] / w[a])));
    let (mut s1, mut s2) = (0.0, 0.0);
    for (k, &i) in order.iter().enumerate() {
        s1 += w[i] * mods[i];
        s2 += w[i] * w[i];
        let theta = (s1 - tau) / s2;
        match order.get(k + 1) {
            Some(&next) if mods[next] / w[next] > theta => continue,
            _ => return theta.max(0.0),
        }
    }
    unreachable!("norm exceeds tau, so some prefix brackets the threshold")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn examples() {
        assert_eq!(
            project_weighted_l1_ball(&[3.0, 0.0], &[1.0, 1.0], 1.0),
            vec![1.0, 0.0]
        );
        let v = project_weighted_l1_ball(&[2.0, 2.0], &[1.0, 2.0], 2.0);
        assert!((v[0] - 1.2).abs() < 1e-15 && (v[1] - 0.4).abs() < 1e-15);
        assert_eq!(
            project_weighted_l1_ball(&[0.1, -0.2], &[1.0, 1.0], 1.0),
            vec![0.1, -0.2]
        );
        assert_eq!(
            project_weighted_l1_ball(&[0.1, -0.2], &[1.0, 1.0], 0.0),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn complex_keeps_phase() {
        let z = [Complex64::new(3.0, 4.0), Complex64::new(0.0, 0.5)];
        let v = project_weighted_l1_ball(&z, &[1.0, 1.0], 2.0);
        // θ = 3 kills the second entry; the first is shrunk from modulus 5 to 2
        assert!((v[0] - Complex64::new(1.2, 1.6)).norm() < 1e-14);
        assert_eq!(v[1], Complex64::new(0.0, 0.0));
    }
}
