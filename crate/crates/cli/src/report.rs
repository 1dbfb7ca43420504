//! Human-readable and key=value renderings of an analysis.

use std::fmt::Write as _;

use islm_core::analysis::Analysis;
use islm_core::model::PARAM_KEYS;
use islm_core::normal_form::NormalForm;
use num_complex::Complex64;

/// Full precision: 17 significant digits.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}

/// Ten significant digits, positional when the magnitude allows.
pub fn sig10(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..10).contains(&exp) {
        format!("{:.*}", (9 - exp).max(0) as usize, x)
    } else {
        format!("{x:.9e}")
    }
}

/// Ordered `(key, value)` records; the text report and the key=value file
/// are both rendered from this list.
#[derive(Debug, Default)]
pub struct Records {
    pub items: Vec<(String, f64)>,
}

impl Records {
    fn push(&mut self, key: impl Into<String>, value: f64) {
        self.items.push((key.into(), value));
    }

    fn push_c(&mut self, key: &str, value: Complex64) {
        self.push(format!("{key}.re"), value.re);
        self.push(format!("{key}.im"), value.im);
    }

    pub fn to_kv(&self) -> String {
        self.items.iter().map(|(k, v)| format!("{k} = {}\n", full(*v))).collect()
    }
}

fn normal_form_records(r: &mut Records, prefix: &str, nf: &NormalForm) {
    let p = |k: &str| format!("{prefix}{k}");
    r.push_c(&p("g20"), nf.g20());
    r.push_c(&p("g11"), nf.g11());
    r.push_c(&p("g02"), nf.g02());
    r.push_c(&p("g21"), nf.g21);
    r.push_c(&p("c1"), nf.quantities.c1);
    r.push(p("mu2"), nf.quantities.mu2);
    r.push(p("beta2"), nf.quantities.beta2);
    r.push(p("t2"), nf.quantities.t2);
}

pub fn records(a: &Analysis) -> Records {
    let mut r = Records::default();
    let values = a.params.values();
    for key in PARAM_KEYS {
        r.push(format!("param.{key}"), values.get(key).unwrap_or(f64::NAN));
    }
    let eq = &a.equilibrium;
    r.push("equilibrium.Y0", eq.y0);
    r.push("equilibrium.r0", eq.r0);
    r.push("equilibrium.K0", eq.k0);
    r.push("equilibrium.M0", eq.m0);
    for (name, m) in [("A", &a.pair.a), ("B", &a.pair.b)] {
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                r.push(format!("{name}.{}{}", i + 1, j + 1), *v);
            }
        }
    }
    let c = &a.stability.coeffs;
    for (k, v) in [("p2", c.p2), ("p1", c.p1), ("p0", c.p0), ("q2", c.q2), ("q1", c.q1), ("q0", c.q0)] {
        r.push(format!("char.{k}"), v);
    }
    if let Some(f) = &a.stability.frequency {
        r.push("freq.aF", f.a_f);
        r.push("freq.bF", f.b_f);
        r.push("freq.cF", f.c_f);
        r.push("freq.k", f.k);
        r.push("freq.discriminant", f.discriminant);
        r.push("freq.printed_discriminant", f.printed_discriminant);
        for (i, w) in f.roots.iter().enumerate() {
            r.push(format!("freq.root{}", i + 1), *w);
        }
    }
    if let Some(h) = a.switch() {
        r.push("omega0", h.omega0);
        r.push("tau0", h.tau0);
        r.push_c("lambda_prime", h.lambda_prime);
    }
    if let Some(Ok(nf)) = &a.normal_form {
        normal_form_records(&mut r, "", nf);
    }
    if let Some(Ok(nf)) = &a.alternative {
        normal_form_records(&mut r, "alt.", nf);
    }
    r
}

fn line(out: &mut String, name: &str, x: f64) {
    let _ = writeln!(out, "  {name:<22} {:>24}   ({})", full(x), sig10(x));
}

fn cline(out: &mut String, name: &str, z: Complex64) {
    let _ = writeln!(out, "  {name:<22} {} {:+.16e}i   ({} {:+}i)", full(z.re), z.im, sig10(z.re), sig10(z.im));
}

fn normal_form_text(out: &mut String, a: &Analysis, nf: &NormalForm) {
    cline(out, "g20", nf.g20());
    cline(out, "g11", nf.g11());
    cline(out, "g02", nf.g02());
    cline(out, "g21", nf.g21);
    cline(out, "C1(0)", nf.quantities.c1);
    line(out, "mu2", nf.quantities.mu2);
    line(out, "beta2", nf.quantities.beta2);
    line(out, "T2", nf.quantities.t2);
    let _ = writeln!(out, "  verdict: {}", nf.quantities.verdict.describe());
    let _ = writeln!(
        out,
        "  checks: <Psi,Phi> - 1 = {:.3e}, |<Psi,conj Phi>| = {:.3e}, |E1 residual| = {:.3e}, |E2 residual| = {:.3e}",
        (nf.eigen.normalization(&a.pair, nf.tau0) - 1.0).norm(),
        nf.eigen.cross_normalization(&a.pair, nf.tau0).norm(),
        nf.manifold.e1_residual(&a.pair, nf.tau0, &nf.quadratic.f20),
        nf.manifold.e2_residual(&a.pair, &nf.quadratic.f11),
    );
}

pub fn text(a: &Analysis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Delayed IS-LM analysis");
    let _ = writeln!(out, "coefficient form: {}", a.stability.form.name());
    let _ = writeln!(out, "E1 variant: {}", a.variant.name());

    let _ = writeln!(out, "\nparameters");
    let values = a.params.values();
    for key in PARAM_KEYS {
        line(&mut out, key, values.get(key).unwrap_or(f64::NAN));
    }

    let _ = writeln!(out, "\nequilibrium");
    let eq = &a.equilibrium;
    for (k, v) in [("Y0", eq.y0), ("r0", eq.r0), ("K0", eq.k0), ("M0", eq.m0)] {
        line(&mut out, k, v);
    }

    for (name, m) in [("A", &a.pair.a), ("B", &a.pair.b)] {
        let _ = writeln!(out, "\nmatrix {name}");
        for row in m.iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{:>24}", full(*v))).collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
    }

    let _ = writeln!(out, "\ncharacteristic coefficients");
    let c = &a.stability.coeffs;
    for (k, v) in [("p2", c.p2), ("p1", c.p1), ("p0", c.p0), ("q2", c.q2), ("q1", c.q1), ("q0", c.q0)] {
        line(&mut out, k, v);
    }
    let _ = writeln!(
        out,
        "  zero-delay Hurwitz: {} (two-condition test: {})",
        a.stability.zero_delay.name(),
        a.stability.zero_delay_two_condition.name()
    );

    let _ = writeln!(out, "\nfrequency equation");
    match &a.stability.frequency {
        None => {
            let _ = writeln!(out, "  no delayed terms: stability does not depend on tau");
        }
        Some(f) => {
            line(&mut out, "aF", f.a_f);
            line(&mut out, "bF", f.b_f);
            line(&mut out, "cF", f.c_f);
            line(&mut out, "k", f.k);
            line(&mut out, "discriminant", f.discriminant);
            line(&mut out, "printed discriminant", f.printed_discriminant);
            let _ = writeln!(out, "  case: {}{}", f.case.label(), if f.degenerate { " (degenerate)" } else { "" });
            if f.roots.is_empty() {
                let _ = writeln!(out, "  no positive crossing frequency");
            }
            for (i, h) in a.stability.hopf_points.iter().enumerate() {
                let _ = writeln!(out, "  crossing {}:", i + 1);
                line(&mut out, "omega", h.omega0);
                line(&mut out, "tau", h.tau0);
                cline(&mut out, "lambda'(tau)", h.lambda_prime);
            }
        }
    }

    let _ = writeln!(out, "\nstability switch");
    match a.switch() {
        None => {
            let _ = writeln!(out, "  no stability switch");
        }
        Some(h) => {
            line(&mut out, "omega0", h.omega0);
            line(&mut out, "tau0", h.tau0);
            cline(&mut out, "lambda'(tau0)", h.lambda_prime);
            let _ = writeln!(out, "  single switch guaranteed: {}", a.stability.single_switch);
        }
    }

    if let Some(nf) = &a.normal_form {
        let _ = writeln!(out, "\nnormal form ({})", a.variant.name());
        match nf {
            Ok(nf) => normal_form_text(&mut out, a, nf),
            Err(e) => {
                let _ = writeln!(out, "  failed: {e}");
            }
        }
    }
    if let Some(nf) = &a.alternative {
        if let Ok(n) = nf {
            let _ = writeln!(out, "\ndiagnostic: normal form ({})", n.manifold.variant.name());
        } else {
            let _ = writeln!(out, "\ndiagnostic: alternative E1 variant");
        }
        match nf {
            Ok(nf) => normal_form_text(&mut out, a, nf),
            Err(e) => {
                let _ = writeln!(out, "  failed: {e}");
            }
        }
    }
    out
}
