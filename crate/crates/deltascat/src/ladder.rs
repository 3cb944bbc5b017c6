//! The inversion ladder for `Γ(λ)⁻¹` at small real `λ` and the leading singular terms.
//!
//! Each step inverts the previous matrix on a shrinking subspace with the Jensen–Nenciu
//! formula: `A` on `S`, `A₁` on `T`, `A₂` on `T_p`, then `A₃` directly. All inverses are
//! taken inside the current subspace through `V(M + 1 − V)⁻¹V`.

use crate::classifier::{CaseLabel, ProjectionChain};
use crate::error::{Error, Result};
use crate::linalg::jensen_nenciu_invert;
use crate::matrix::{inverse_on, Mat};
use crate::operator::gamma_real;
use crate::scalar::{Cx, Real};
use crate::specfun::g_real;

type CMat<R> = Mat<Cx<R>>;

/// Every intermediate matrix of the ladder at one `λ`.
#[derive(Clone, Debug)]
pub struct ExpansionLadder<R: Real> {
    pub lambda: R,
    pub g: Cx<R>,
    pub n: usize,
    pub gamma: CMat<R>,
    /// `A = Γ/(−Ng)`.
    pub a: CMat<R>,
    /// `F = −D̃/N`.
    pub f: CMat<R>,
    /// `ℛ = Γ₁ + g⁻¹Γ₂`.
    pub r: CMat<R>,
    /// `Φ = (1 + g⁻¹F)⁻¹`.
    pub phi: CMat<R>,
    /// `𝓜₀ = A + S − 1 − g⁻¹F`.
    pub m0: CMat<R>,
    /// `B = S − S(A+S)⁻¹S`.
    pub b: CMat<R>,
    /// `A₁ = −NgB`.
    pub a1: CMat<R>,
    /// `A₁` through `L − NgSΦ(1+𝓜₀Φ)⁻¹𝓜₀ΦS`.
    pub a1_expanded: CMat<R>,
    /// `L = −Ng(S − SΦS)`.
    pub l: CMat<R>,
    /// `L = SD̃S + g⁻¹N⁻¹SD̃²ΦS`.
    pub l_alt: CMat<R>,
    /// `ℛ₁ = (L − A₁)/(gλ²)`.
    pub r1: CMat<R>,
    pub step2: Option<Step2<R>>,
    pub step3: Option<Step3<R>>,
    pub step4: Option<Step4<R>>,
    /// `Γ⁻¹` assembled back down the ladder.
    pub gamma_inverse: CMat<R>,
}

#[derive(Clone, Debug)]
pub struct Step2<R: Real> {
    /// `F̃ = N⁻¹SD̃ΦD̃S(SD̃S+T)⁻¹`.
    pub f_tilde: CMat<R>,
    /// `B₁ = T − T(A₁+T)⁻¹T`.
    pub b1: CMat<R>,
    /// `A₂ = NgB₁`.
    pub a2: CMat<R>,
    /// `F₂ = N⁻¹TD̃²ΦD̃T − N T F̃²(1+g⁻¹F̃)⁻¹T`.
    pub f2: CMat<R>,
    /// `Ã₂ = TD̃²T + g⁻¹F₂`.
    pub a2_tilde: CMat<R>,
    /// `ℛ₂ = (T − T(L+T)⁻¹T − B₁)/(gλ²)`.
    pub r2: CMat<R>,
}

#[derive(Clone, Debug)]
pub struct Step3<R: Real> {
    /// `B₂ = T_p − T_p(A₂+T_p)⁻¹T_p`.
    pub b2: CMat<R>,
    /// `A₃ = N⁻¹T_pℛ₂(1−X)⁻¹T_p`, `X = g²λ²N(Ã₂+T_p)⁻¹ℛ₂`.
    pub a3: CMat<R>,
    pub g1: CMat<R>,
    pub g2: CMat<R>,
    /// `B_* = (G₁ + g⁻¹G₂)⁻¹` on `T_p`.
    pub b_star: CMat<R>,
}

#[derive(Clone, Debug)]
pub struct Step4<R: Real> {
    /// `H = (T_eG₂T_e)⁻¹` on `T_e`.
    pub h: CMat<R>,
    /// `ℬ = T_e^⊥G₂T_eH`.
    pub bb: CMat<R>,
    /// `D₀ = (T⊥G₁T⊥ + g⁻¹(T⊥G₂T⊥ − T⊥G₂T_eHT_eG₂T⊥))⁻¹` on `T_e^⊥`.
    pub d0: CMat<R>,
    /// `B_** = −(iNπ)⁻¹(T⊥ − ℬ*)D₀(T⊥ − ℬ)`.
    pub b_star_star: CMat<R>,
}

fn c<R: Real>(x: R) -> Cx<R> {
    Cx::new(x, R::zero())
}

fn cplx<R: Real>(m: &Mat<R>) -> CMat<R> {
    m.to_complex()
}

fn inv_on<R: Real>(m: &CMat<R>, v: &CMat<R>, what: &str, lam: R) -> Result<CMat<R>> {
    inverse_on(m, v).map_err(|_| Error::Ladder {
        display: what.into(),
        reason: format!("singular at λ = {:e}", lam.to_f64()),
    })
}

/// Jensen–Nenciu on the subspace `V`: returns `(M⁻¹ on V, B-block)` for inner projection `Q ≤ V`,
/// together with `(M+Q)⁻¹` on `V`.
fn jn_on<R: Real>(m: &CMat<R>, v: &CMat<R>, q: &CMat<R>, what: &str, lam: R) -> Result<(CMat<R>, CMat<R>)> {
    let n = m.rows();
    let full = m + &(&Mat::identity(n) - v);
    let r = jensen_nenciu_invert(&full, q).map_err(|e| Error::Ladder {
        display: what.into(),
        reason: format!("{e} at λ = {:e}", lam.to_f64()),
    })?;
    Ok((v * &r.a_plus_s_inverse * v, r.b_block))
}

/// Build the ladder down to the depth the chain requires.
pub fn build_ladder_in<R: Real>(
    alpha: &[R],
    points: &[[f64; 2]],
    chain: &ProjectionChain<R>,
    lam: R,
) -> Result<ExpansionLadder<R>> {
    let n = alpha.len();
    let nr = R::from_f64(n as f64);
    let nc = c(nr);
    let one = Mat::<Cx<R>>::identity(n);
    let st = &chain.structure;
    let g = g_real(lam);
    let gi = c(R::one()) / g;
    let l2 = c(lam * lam);
    let dt = cplx(&st.dtilde);
    let dt2 = &dt * &dt;
    let s = cplx(&chain.s_proj);
    let t = cplx(&chain.t_proj);
    let tp = cplx(&chain.tp_proj);
    let te = cplx(&chain.te_proj);

    let gamma = gamma_real(alpha, points, lam);
    let a = gamma.scale(-(gi / nc));
    let f = dt.scale(-c(R::one() / nr));
    let r = &cplx(&st.gamma1) + &cplx(&st.gamma2).scale(gi);
    let phi = (&one + &f.scale(gi)).inverse().map_err(|_| Error::Ladder {
        display: "Φ = (1 + g⁻¹F)⁻¹".into(),
        reason: "singular".into(),
    })?;
    let m0 = &(&(&a + &s) - &one) - &f.scale(gi);

    // Step 1
    let jn = jensen_nenciu_invert(&a, &s).map_err(|e| Error::Ladder {
        display: "A + S".into(),
        reason: e.to_string(),
    })?;
    let b = jn.b_block.clone();
    let a1 = b.scale(-(nc * g));
    let sps = &(&s * &phi) * &s;
    let l = (&s - &sps).scale(-(nc * g));
    let l_alt = &(&(&s * &dt) * &s) + &(&(&(&s * &dt2) * &phi) * &s).scale(gi / nc);
    let inner = (&one + &(&m0 * &phi)).inverse().map_err(|_| Error::Ladder {
        display: "1 + 𝓜₀Φ".into(),
        reason: "singular".into(),
    })?;
    let corr = &(&(&(&(&s * &phi) * &inner) * &m0) * &phi) * &s;
    let a1_expanded = &l - &corr.scale(nc * g);
    let r1 = (&l - &a1).scale(c(R::one()) / (g * l2));

    let mut step2 = None;
    let mut step3 = None;
    let mut step4 = None;

    let inv_a_from_b = |binv_on_s: &CMat<R>| -> CMat<R> {
        let aps = &jn.a_plus_s_inverse;
        aps + &(&(&(&(aps * &s) * binv_on_s) * &s) * aps)
    };

    let gamma_inverse = if chain.case == CaseLabel::Case1 {
        let a1inv = inv_on(&a1, &s, "A₁ on S", lam)?;
        let binv = a1inv.scale(-(nc * g));
        inv_a_from_b(&binv).scale(-(gi / nc))
    } else {
        // Step 2: A₁ on S with inner projection T
        let sdts = &(&s * &dt) * &s;
        let k_inv = inv_on(&(&sdts + &t), &s, "SD̃S + T", lam)?;
        let f_tilde = (&(&(&(&s * &dt) * &phi) * &dt) * &s) * &k_inv;
        let f_tilde = f_tilde.scale(c(R::one() / nr));
        let (a1t_inv, b1) = jn_on(&a1, &s, &t, "A₁ + T", lam)?;
        let _ = a1t_inv;
        let a2 = b1.scale(nc * g);
        let ft_res = (&one + &f_tilde.scale(gi)).inverse().map_err(|_| Error::Ladder {
            display: "1 + g⁻¹F̃".into(),
            reason: "singular".into(),
        })?;
        let f2 = &(&(&(&(&t * &dt2) * &phi) * &dt) * &t).scale(c(R::one() / nr))
            - &(&(&(&t * &(&f_tilde * &f_tilde)) * &ft_res) * &t).scale(nc);
        let td2t = &(&t * &dt2) * &t;
        let a2_tilde = &td2t + &f2.scale(gi);
        let lt_inv = inv_on(&(&l + &t), &s, "L + T", lam)?;
        let r2 = (&(&t - &(&(&t * &lt_inv) * &t)) - &b1).scale(c(R::one()) / (g * l2));

        let a1inv_on_s = if chain.case == CaseLabel::Case2 {
            let a2inv = inv_on(&a2, &t, "A₂ on T", lam)?;
            let b1inv = a2inv.scale(nc * g);
            jn_assemble(&a1, &s, &t, &b1inv, lam)?
        } else {
            // Step 3: A₂ on T with inner projection T_p
            let (_, b2) = jn_on(&a2, &t, &tp, "A₂ + T_p", lam)?;
            let a2t_inv = inv_on(&(&a2_tilde + &tp), &t, "Ã₂ + T_p", lam)?;
            let x = (&a2t_inv * &r2).scale(g * g * l2 * nc);
            let omx = (&one - &x).inverse().map_err(|_| Error::Ladder {
                display: "1 − X".into(),
                reason: "singular".into(),
            })?;
            let a3 = (&(&(&tp * &r2) * &omx) * &tp).scale(c(R::one() / nr));
            let g1 = &(&tp * &cplx(&st.gamma1)) * &tp;
            let g2 = &(&tp * &cplx(&st.gamma2)) * &tp;
            let b_star = inv_on(&(&g1 + &g2.scale(gi)), &tp, "G₁ + g⁻¹G₂", lam)?;

            if matches!(chain.case, CaseLabel::Case4) {
                let tperp = &tp - &te;
                let h = inv_on(&(&(&te * &g2) * &te), &te, "T_eG₂T_e", lam)?;
                let bb = &(&(&tperp * &g2) * &te) * &h;
                let g2p = &(&tperp * &g2) * &tperp;
                let corr = &(&(&(&(&tperp * &g2) * &te) * &h) * &te) * &(&g2 * &tperp);
                let inner = &(&(&tperp * &g1) * &tperp) + &(&g2p - &corr).scale(gi);
                let d0 = inv_on(&inner, &tperp, "D₀", lam)?;
                let left = &tperp - &bb.transpose();
                let right = &tperp - &bb;
                let ipi = Cx::new(R::zero(), nr * R::pi());
                let b_star_star = (&(&left * &d0) * &right).scale(-(c(R::one()) / ipi));
                step4 = Some(Step4 { h, bb, d0, b_star_star });
            }

            let a3inv = inv_on(&a3, &tp, "A₃ on T_p", lam)?;
            // B₂ = −N²g²λ²A₃
            let b2inv = a3inv.scale(-(c(R::one()) / (nc * nc * g * g * l2)));
            let a2inv = jn_assemble(&a2, &t, &tp, &b2inv, lam)?;
            step3 = Some(Step3 { b2, a3, g1, g2, b_star });
            let b1inv = a2inv.scale(nc * g);
            jn_assemble(&a1, &s, &t, &b1inv, lam)?
        };
        step2 = Some(Step2 { f_tilde, b1, a2, f2, a2_tilde, r2 });
        let binv = a1inv_on_s.scale(-(nc * g));
        inv_a_from_b(&binv).scale(-(gi / nc))
    };

    Ok(ExpansionLadder {
        lambda: lam,
        g,
        n,
        gamma,
        a,
        f,
        r,
        phi,
        m0,
        b,
        a1,
        a1_expanded,
        l,
        l_alt,
        r1,
        step2,
        step3,
        step4,
        gamma_inverse,
    })
}

/// `M⁻¹ = (M+Q)⁻¹ + (M+Q)⁻¹ Q B⁻¹ Q (M+Q)⁻¹` on `range V`.
fn jn_assemble<R: Real>(m: &CMat<R>, v: &CMat<R>, q: &CMat<R>, binv: &CMat<R>, lam: R) -> Result<CMat<R>> {
    let mq = inv_on(&(m + q), v, "M + Q", lam)?;
    Ok(&mq + &(&(&(&(&mq * q) * binv) * q) * &mq))
}

/// Identity and annihilation defects of a ladder, all relative except the annihilation norms.
#[derive(Clone, Debug, Default)]
pub struct LadderChecks {
    /// `‖B − (−g⁻¹A₁/N)‖/‖B‖` with `A₁` from the expanded path.
    pub b_vs_a1: f64,
    /// `‖L − L_alt‖/‖L‖`.
    pub l_routes: f64,
    /// `‖A₂ − (Ã₂ − g²λ²Nℛ₂)‖/‖A₂‖`.
    pub a2_identity: f64,
    /// `‖B₂ + N²g²λ²A₃‖/‖B₂‖`.
    pub b2_identity: f64,
    pub dt_tp: f64,
    pub tp_ftilde: f64,
    pub tp_l: f64,
    pub tp_f2: f64,
    pub a2tilde_tp: f64,
    /// `‖ΓΓ⁻¹ − 1‖` for the assembled inverse (relative).
    pub inverse_residual: f64,
}

impl<R: Real> ExpansionLadder<R> {
    pub fn checks(&self, chain: &ProjectionChain<R>) -> LadderChecks {
        let rel = |x: &CMat<R>, y: &CMat<R>| {
            let d = (x - y).op_norm().to_f64();
            d / x.op_norm().to_f64().max(1e-300)
        };
        let nc = c(R::from_f64(self.n as f64));
        let l2 = c(self.lambda * self.lambda);
        let gi = c(R::one()) / self.g;
        let mut out = LadderChecks {
            b_vs_a1: rel(&self.b, &self.a1_expanded.scale(-(gi / nc))),
            l_routes: rel(&self.l, &self.l_alt),
            ..Default::default()
        };
        let tp = cplx(&chain.tp_proj);
        let dt = cplx(&chain.structure.dtilde);
        out.dt_tp = (&dt * &tp).op_norm().to_f64();
        out.tp_l = (&tp * &self.l).op_norm().to_f64();
        if let Some(s2) = &self.step2 {
            let rhs = &s2.a2_tilde - &s2.r2.scale(self.g * self.g * l2 * nc);
            out.a2_identity = rel(&s2.a2, &rhs);
            out.tp_ftilde = (&tp * &s2.f_tilde).op_norm().to_f64();
            out.tp_f2 = (&tp * &s2.f2).op_norm().to_f64();
            out.a2tilde_tp = (&s2.a2_tilde * &tp).op_norm().to_f64();
        }
        if let Some(s3) = &self.step3 {
            let rhs = s3.a3.scale(-(nc * nc * self.g * self.g * l2));
            out.b2_identity = rel(&s3.b2, &rhs);
        }
        out.inverse_residual = self.gamma.inverse_residual(&self.gamma_inverse);
        out
    }
}

/// Leading singular part of `Γ(λ)⁻¹` for the chain's case (zero in Case1).
pub fn leading_term_in<R: Real>(chain: &ProjectionChain<R>, lam: R) -> Result<CMat<R>> {
    let n = chain.s_proj.rows();
    let nr = R::from_f64(n as f64);
    let nc = c(nr);
    let g = g_real(lam);
    let gi = c(R::one()) / g;
    let l2 = c(lam * lam);
    let st = &chain.structure;
    let t = cplx(&chain.t_proj);
    let tp = cplx(&chain.tp_proj);
    let te = cplx(&chain.te_proj);
    let g1 = &(&tp * &cplx(&st.gamma1)) * &tp;
    let g2 = &(&tp * &cplx(&st.gamma2)) * &tp;
    Ok(match chain.case {
        CaseLabel::Case1 => Mat::zeros(n, n),
        CaseLabel::Case2 => {
            let dt = cplx(&st.dtilde);
            let td2t = &(&t * &(&dt * &dt)) * &t;
            inv_on(&td2t, &t, "TD̃²T", lam)?.scale(nc * g)
        }
        CaseLabel::Case3 => {
            let bs = inv_on(&(&g1 + &g2.scale(gi)), &tp, "G₁ + g⁻¹G₂", lam)?;
            bs.scale(-(c(R::one()) / (nc * g * l2)))
        }
        CaseLabel::Case4 => {
            let tperp = &tp - &te;
            let h = inv_on(&(&(&te * &g2) * &te), &te, "T_eG₂T_e", lam)?;
            let bb = &(&(&tperp * &g2) * &te) * &h;
            let corr = &(&(&(&(&tperp * &g2) * &te) * &h) * &te) * &(&g2 * &tperp);
            let inner = &(&(&tperp * &g1) * &tperp) + &(&(&(&tperp * &g2) * &tperp) - &corr).scale(gi);
            let d0 = inv_on(&inner, &tperp, "D₀", lam)?;
            let first = h.scale(-(c(R::one()) / (nc * l2)));
            let second = (&(&(&tperp - &bb.transpose()) * &d0) * &(&tperp - &bb)).scale(-(c(R::one()) / (nc * g * l2)));
            &first + &(&(&tp * &second) * &tp)
        }
        CaseLabel::Case5 => {
            let g2e = &(&te * &cplx(&st.gamma2)) * &te;
            inv_on(&g2e, &te, "T_eG₂T_e", lam)?.scale(-(c(R::one()) / (nc * l2)))
        }
    })
}
