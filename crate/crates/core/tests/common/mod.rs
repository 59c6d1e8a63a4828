//! Reference computations that share no code with the library.

#![allow(dead_code)]

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// Two-sided Student-t tail by integrating the density.
///
/// Substituting `x = sqrt(df) tan(θ)` turns the unnormalized density
/// `(1 + x²/df)^(-(df+1)/2) dx` into `sqrt(df) cos(θ)^(df-1) dθ` on
/// `[0, π/2)`, so no gamma function is needed for the normalization.
pub fn t_tail_quadrature(t: f64, df: f64) -> f64 {
    let g = move |th: f64| th.cos().powf(df - 1.0);
    let upper = (t.abs() / df.sqrt()).atan();
    let half = std::f64::consts::FRAC_PI_2;
    let inner = integrate(&g, 0.0, upper, 1e-13);
    let total = integrate(&g, 0.0, half, 1e-13);
    (1.0 - inner / total).clamp(0.0, 1.0)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    // rank = 1 + #smaller + (#equal - 1) / 2
    v.iter()
        .map(|x| {
            let smaller = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

fn corr(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> f64 {
    corr(&ranks(x), &ranks(y))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Exact two-sided permutation p-value of Spearman's rho: the share of the
/// `n!` re-pairings of y whose |rho| reaches the observed |rho|.
pub fn spearman_permutation_p(x: &[f64], y: &[f64]) -> f64 {
    let rx = ranks(x);
    let ry = ranks(y);
    let observed = corr(&rx, &ry).abs();
    let perms = permutations(y.len());
    let hits = perms
        .iter()
        .filter(|p| {
            let shuffled: Vec<f64> = p.iter().map(|&i| ry[i]).collect();
            corr(&rx, &shuffled).abs() >= observed - 1e-12
        })
        .count();
    hits as f64 / perms.len() as f64
}

/// Mann-Whitney U of `a` by pairwise comparison.
pub fn u_statistic(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| (x, y)))
        .map(|(x, y)| {
            if x > y {
                1.0
            } else if x == y {
                0.5
            } else {
                0.0
            }
        })
        .sum()
}

/// Exact two-sided p over every way of labelling `|a|` of the pooled values
/// as sample a.
pub fn mann_whitney_enumeration(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let na = a.len();
    let mean = (na * b.len()) as f64 / 2.0;
    let observed = (u_statistic(a, b) - mean).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let (mut xa, mut xb) = (Vec::new(), Vec::new());
        for (i, v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                xa.push(*v);
            } else {
                xb.push(*v);
            }
        }
        total += 1;
        if (u_statistic(&xa, &xb) - mean).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

/// Welch t and Welch-Satterthwaite df from first principles.
pub fn welch_reference(a: &[f64], b: &[f64]) -> (f64, f64) {
    let stats = |v: &[f64]| {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let s2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        (n, m, s2)
    };
    let (na, ma, va) = stats(a);
    let (nb, mb, vb) = stats(b);
    let se2 = va / na + vb / nb;
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    (t, df)
}

/// Small deterministic generator for test data, independent of the library.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_f64() * n as f64) as usize
    }

    pub fn sample(&mut self, n: usize, scale: f64, shift: f64) -> Vec<f64> {
        (0..n).map(|_| shift + scale * self.next_f64()).collect()
    }
}
