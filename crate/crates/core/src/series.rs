//! Composition-series solvers.
//!
//! Two routes compute the group of automorphisms fixing every member of a
//! composition series: bottom-up along the given series (each section
//! quotient is simple, so its automorphism group is listable), and top-down
//! along a characteristic refinement (sections are characteristically
//! simple, with structured automorphism groups).  Series-matching
//! isomorphism of two groups reduces to the automorphism computation on
//! their direct product with the interleaved series, keeping only
//! automorphisms that fix or switch the factors.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{CsisoError, EngineError, GroupError};
use crate::group::{
    direct_product, is_characteristically_simple, is_simple, minimal_normal_subgroups,
    normal_subgroups, quotient, subgroup_generated, GroupHom, GroupRef, Subgroup,
};
use crate::homsearch;
use crate::lifting::{build_context, lift_automorphisms, LiftLaw};
use crate::perm::Perm;
use crate::permgroup::PermGroup;
use crate::setstab::{set_stabilizer, set_transporter};

/// Engine selection for the solvers: the default picks the two-sided law for
/// bottom-up rounds and per-section laws for top-down (one-sided on abelian
/// sections).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    #[default]
    Auto,
    ForceOneSided,
    ForceTwoSided,
}

impl EngineChoice {
    fn law_for(self, abelian_section: bool) -> LiftLaw {
        match self {
            EngineChoice::Auto => {
                if abelian_section {
                    LiftLaw::OneSided
                } else {
                    LiftLaw::TwoSided
                }
            }
            EngineChoice::ForceOneSided => LiftLaw::OneSided,
            EngineChoice::ForceTwoSided => LiftLaw::TwoSided,
        }
    }

    fn bottom_up_law(self) -> LiftLaw {
        match self {
            EngineChoice::ForceOneSided => LiftLaw::OneSided,
            _ => LiftLaw::TwoSided,
        }
    }
}

/// A descending chain of subgroups from the whole group to the identity.
#[derive(Debug, Clone)]
pub struct SeriesSpec {
    group: GroupRef,
    terms: Vec<Subgroup>,
}

impl SeriesSpec {
    /// Wraps the chain; per-term subgroup axioms are checked, the chain
    /// conditions are left to [`validate_series`].
    pub fn new(group: &GroupRef, term_elements: Vec<Vec<u32>>) -> Result<SeriesSpec, GroupError> {
        let terms = term_elements
            .into_iter()
            .map(|els| Subgroup::new(group, els))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesSpec {
            group: group.clone(),
            terms,
        })
    }

    pub fn from_subgroups(group: &GroupRef, terms: Vec<Subgroup>) -> SeriesSpec {
        SeriesSpec {
            group: group.clone(),
            terms,
        }
    }

    pub fn group(&self) -> &GroupRef {
        &self.group
    }

    pub fn terms(&self) -> &[Subgroup] {
        &self.terms
    }

    pub fn term_elements(&self) -> Vec<Vec<u32>> {
        self.terms.iter().map(|t| t.elements().to_vec()).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Outcome of validating a series against the composition-series invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violation: Option<String>,
}

impl ValidationReport {
    fn fail(msg: impl Into<String>) -> ValidationReport {
        ValidationReport {
            ok: false,
            violation: Some(msg.into()),
        }
    }
    fn pass() -> ValidationReport {
        ValidationReport {
            ok: true,
            violation: None,
        }
    }
}

/// Checks the chain invariants: starts at the whole group, ends at the
/// identity, strictly decreases, each term normal in its predecessor, and
/// every section quotient simple.  Reports the first violation found.
pub fn validate_series(spec: &SeriesSpec) -> ValidationReport {
    let g = &spec.group;
    if spec.terms.is_empty() {
        return ValidationReport::fail("series has no terms");
    }
    if spec.terms[0].order() != g.order() {
        return ValidationReport::fail("first term is not the whole group");
    }
    if spec.terms.last().unwrap().order() != 1 {
        return ValidationReport::fail("last term is not the identity subgroup");
    }
    for i in 0..spec.terms.len() - 1 {
        let outer = &spec.terms[i];
        let inner = &spec.terms[i + 1];
        if inner.order() >= outer.order() {
            return ValidationReport::fail(format!("series not strictly decreasing at step {i}"));
        }
        if !inner.is_subset_of(outer) {
            return ValidationReport::fail(format!("term {} not contained in term {}", i + 1, i));
        }
        // Normal in the predecessor (not necessarily in the whole group).
        for &t in outer.elements() {
            for &x in inner.elements() {
                if !inner.contains(g.conj(x, t)) {
                    return ValidationReport::fail(format!(
                        "term {} not normal in term {} (conjugation by {t})",
                        i + 1,
                        i
                    ));
                }
            }
        }
        let outer_group = outer.as_group("outer");
        let inner_sub = localize_subgroup(outer, inner, &outer_group);
        let (section, _) = quotient(&outer_group, &inner_sub).expect("validated normality");
        if !is_simple(&section) {
            return ValidationReport::fail(format!("section {i} is not simple"));
        }
    }
    ValidationReport::pass()
}

fn require_composition_series(spec: &SeriesSpec) -> Result<(), CsisoError> {
    let report = validate_series(spec);
    if report.ok {
        Ok(())
    } else {
        Err(GroupError::BadSeries(report.violation.unwrap_or_default()).into())
    }
}

fn listed_aut_group(g: &GroupRef) -> Result<PermGroup, EngineError> {
    let auts = homsearch::list_automorphisms(g);
    Ok(PermGroup::from_generators_with_degree(g.order(), auts)?.with_auto_witness())
}

/// Localizes a nested subgroup into the standalone group of an ambient
/// subgroup of the same parent.
fn localize_subgroup(ambient: &Subgroup, inner: &Subgroup, local: &GroupRef) -> Subgroup {
    let elems: Vec<u32> = inner
        .elements()
        .iter()
        .map(|&x| ambient.position_of(x).expect("nested subgroup") as u32)
        .collect();
    Subgroup::new(local, elems).expect("localized subgroup")
}

// ---------------------------------------------------------------------------
// Bottom-up
// ---------------------------------------------------------------------------

/// Series-fixing automorphism group computed bottom-up: from a solution for
/// `G_i` (automorphisms fixing the tail) to a solution for `G_{i-1}`,
/// lifting through the simple section with its full listed automorphism
/// group.
pub fn bottom_up_auto(spec: &SeriesSpec) -> Result<PermGroup, CsisoError> {
    bottom_up_auto_with(spec, EngineChoice::Auto)
}

pub fn bottom_up_auto_with(
    spec: &SeriesSpec,
    engine: EngineChoice,
) -> Result<PermGroup, CsisoError> {
    require_composition_series(spec)?;
    Ok(bottom_up_over_terms(&spec.terms, engine, None)?.0)
}

struct FactorPairs {
    /// Per level: the two interleaved factor subgroups of the product,
    /// `G_{1,i} x G_{2,i+1}` and `G_{1,i+1} x G_{2,i}`.
    left: Vec<Subgroup>,
    right: Vec<Subgroup>,
}

/// Shared bottom-up driver.  When `factor_pairs` is given (the isomorphism
/// accommodation), each round restricts the section automorphisms to those
/// fixing or switching the two factors and fails fast when no switching
/// automorphism survives at some level.
fn bottom_up_over_terms(
    terms: &[Subgroup],
    engine: EngineChoice,
    factor_pairs: Option<&FactorPairs>,
) -> Result<(PermGroup, bool), CsisoError> {
    let m = terms.len() - 1;
    let mut solution = PermGroup::trivial_of_degree(1).with_auto_witness();
    for i in (1..=m).rev() {
        let ambient = &terms[i - 1];
        let local = ambient.as_group(format!("term{}", i - 1));
        let h = localize_subgroup(ambient, &terms[i], &local);
        let ctx = build_context(&local, &h)?;
        let quotient_auts = match factor_pairs {
            None => listed_aut_group(ctx.quotient())?,
            Some(fp) => match fix_or_switch_auts(&ctx, ambient, &fp.left[i - 1], &fp.right[i - 1])?
            {
                Some(a) => a,
                None => return Ok((solution, false)),
            },
        };
        solution = lift_automorphisms(&ctx, &quotient_auts, &solution, engine.bottom_up_law())?;
        if let Some(fp) = factor_pairs {
            // Exit early when no automorphism of this term switches the
            // factors: a global factor-switching automorphism would restrict
            // to one here.
            let left_pts: Vec<u32> = fp.left[i - 1]
                .elements()
                .iter()
                .map(|&x| ambient.position_of(x).unwrap() as u32)
                .collect();
            let right_pts: Vec<u32> = fp.right[i - 1]
                .elements()
                .iter()
                .map(|&x| ambient.position_of(x).unwrap() as u32)
                .collect();
            let coset = set_transporter(&solution, &left_pts, &right_pts)?;
            if coset.is_empty() {
                return Ok((solution, false));
            }
        }
    }
    Ok((solution, true))
}

// ---------------------------------------------------------------------------
// Characteristic refinement and top-down
// ---------------------------------------------------------------------------

/// A descending chain of characteristic subgroups with characteristically
/// simple sections, together with the simple-factor decomposition of each
/// section (factor element lists, local to the section quotient).
#[derive(Debug, Clone)]
pub struct CharSeries {
    pub terms: Vec<Subgroup>,
    pub section_factors: Vec<Vec<Vec<u32>>>,
}

/// Builds the characteristic series by layered minimal-normal-subgroup
/// aggregation (grouping by simple-factor type, smallest factor order
/// first), refines each gap by intersecting with the given series, and
/// returns the refined composition series with a provenance map: for each
/// refined term, the `(gap, original term)` pair it came from.
pub fn characteristic_refinement(
    spec: &SeriesSpec,
) -> Result<(CharSeries, SeriesSpec, Vec<(usize, usize)>), CsisoError> {
    require_composition_series(spec)?;
    let g = &spec.group;

    // Ascending characteristic layers: in the quotient by the current layer,
    // take all minimal normal subgroups of the smallest simple-factor type
    // and pull back.
    let mut layers: Vec<Subgroup> = vec![subgroup_generated(g, &[])?];
    while layers.last().unwrap().order() < g.order() {
        let cur = layers.last().unwrap();
        let (q, proj) = quotient(g, cur)?;
        let mins = minimal_normal_subgroups(&q);
        let typed: Vec<(usize, &Subgroup)> = mins
            .iter()
            .map(|n| {
                let ng = n.as_group("n");
                let factors = is_characteristically_simple(&ng)
                    .expect("minimal normal subgroups are characteristically simple");
                (factors[0].order(), n)
            })
            .collect();
        let smallest = typed
            .iter()
            .map(|(t, _)| *t)
            .min()
            .expect("nontrivial quotient");
        let mut seeds: Vec<u32> = Vec::new();
        for (t, n) in &typed {
            if *t == smallest {
                seeds.extend_from_slice(n.elements());
            }
        }
        let layer_q = subgroup_generated(&q, &seeds)?;
        layers.push(proj.preimage(&layer_q)?);
    }
    let char_terms: Vec<Subgroup> = layers.into_iter().rev().collect();

    // Simple-factor decompositions of the sections.
    let mut section_factors: Vec<Vec<Vec<u32>>> = Vec::new();
    for i in 0..char_terms.len() - 1 {
        let outer = char_terms[i].as_group("outer");
        let inner = localize_subgroup(&char_terms[i], &char_terms[i + 1], &outer);
        let (section, _) = quotient(&outer, &inner)?;
        let factors = is_characteristically_simple(&section).ok_or_else(|| {
            GroupError::BadSeries("characteristic section is not characteristically simple".into())
        })?;
        section_factors.push(factors.iter().map(|f| f.elements().to_vec()).collect());
    }

    // Refine each gap with the original terms and deduplicate.
    let mut refined: Vec<Subgroup> = Vec::new();
    let mut provenance: Vec<(usize, usize)> = Vec::new();
    for i in 0..char_terms.len() - 1 {
        let upper = &char_terms[i];
        let lower = &char_terms[i + 1];
        for (j, orig) in spec.terms.iter().enumerate() {
            // (K_i ∩ G_j) K_{i+1}
            let mut elems: Vec<u32> = Vec::new();
            for &a in upper.elements() {
                if orig.contains(a) {
                    for &b in lower.elements() {
                        elems.push(g.mul(a, b));
                    }
                }
            }
            elems.sort_unstable();
            elems.dedup();
            let term = Subgroup::new(g, elems)?;
            if refined.last().map(|t: &Subgroup| t.elements()) != Some(term.elements()) {
                refined.push(term);
                provenance.push((i, j));
            }
        }
    }
    let refined_spec = SeriesSpec {
        group: g.clone(),
        terms: refined,
    };
    let report = validate_series(&refined_spec);
    if !report.ok {
        return Err(GroupError::BadSeries(format!(
            "characteristic refinement failed: {}",
            report.violation.unwrap_or_default()
        ))
        .into());
    }
    Ok((
        CharSeries {
            terms: char_terms,
            section_factors,
        },
        refined_spec,
        provenance,
    ))
}

/// Series-fixing automorphism group computed top-down over the
/// characteristic refinement, then cut back to the original series with set
/// stabilizers (outermost term first).
pub fn top_down_auto(spec: &SeriesSpec) -> Result<PermGroup, CsisoError> {
    top_down_auto_with(spec, EngineChoice::Auto)
}

pub fn top_down_auto_with(
    spec: &SeriesSpec,
    engine: EngineChoice,
) -> Result<PermGroup, CsisoError> {
    require_composition_series(spec)?;
    let g = &spec.group;
    let (chars, refined, _) = characteristic_refinement(spec)?;
    let k = chars.terms.len() - 1;

    let mut solution = PermGroup::trivial_of_degree(1).with_auto_witness();
    let mut prev_quotient: Option<GroupRef> = None;
    for i in 0..k {
        let (ambient, proj) = quotient(g, &chars.terms[i + 1])?;
        let h = proj.image_of(&chars.terms[i])?;
        let ctx = build_context(&ambient, &h)?;
        // The inherited solution acts on G/K_i; the context's quotient must
        // label its points identically.
        if let Some(prev) = &prev_quotient {
            if ctx.quotient().table() != prev.table() {
                return Err(EngineError::Contract(
                    "quotient relabeling mismatch between rounds".into(),
                )
                .into());
            }
        }
        // Section flag: refined terms between K_{i+1} and K_i, localized to
        // the section quotient.
        let section_group = h.as_group("section");
        let mut flags: Vec<Vec<u32>> = Vec::new();
        for t in refined.terms() {
            if chars.terms[i + 1].is_subset_of(t) && t.is_subset_of(&chars.terms[i]) {
                let imaged = proj.image_of(t)?;
                let local: Vec<u32> = imaged
                    .elements()
                    .iter()
                    .map(|&x| h.position_of(x).expect("flag inside section") as u32)
                    .collect();
                flags.push(local);
            }
        }
        flags.sort_by_key(|f| std::cmp::Reverse(f.len()));
        flags.dedup();
        let (sub_auts, abelian) = section_flag_auts(&section_group, &flags)?;
        solution = lift_automorphisms(&ctx, &solution, &sub_auts, engine.law_for(abelian))?;
        prev_quotient = Some(ambient);
    }

    // Cut back to the original series, outermost first; terms already fixed
    // as members of the refined series need no cut.
    let refined_sets: Vec<&[u32]> = refined.terms().iter().map(|t| t.elements()).collect();
    for term in &spec.terms[1..spec.terms.len() - 1] {
        if refined_sets.iter().any(|r| *r == term.elements()) {
            continue;
        }
        solution = set_stabilizer(&solution, term.elements())?;
    }
    Ok(solution)
}

/// The automorphisms of a characteristically simple section fixing the given
/// composition flag: for an elementary abelian section, the flag-triangular
/// group over `GF(p)` (diagonal scalings and adjacent transvections); for a
/// nonabelian section, the direct product of the automorphism groups of the
/// simple factors aligned with the flag.  Returns the group and whether the
/// section is abelian.
pub fn section_flag_auts(
    section: &GroupRef,
    flags: &[Vec<u32>],
) -> Result<(PermGroup, bool), CsisoError> {
    let n = section.order();
    if n == 1 {
        return Ok((PermGroup::trivial_of_degree(1).with_auto_witness(), true));
    }
    if section.is_abelian() {
        let p = section.element_order(1);
        let k = flags.len() - 1;
        // Basis aligned with the flag: e_j extends flags[k-j+1] to flags[k-j],
        // so <e_1..e_j> = flags[k-j].
        let mut basis: Vec<u32> = Vec::new();
        for j in 1..=k {
            let upper: &Vec<u32> = &flags[k - j];
            let lower: &Vec<u32> = &flags[k - j + 1];
            let e = upper
                .iter()
                .copied()
                .find(|x| lower.binary_search(x).is_err())
                .ok_or_else(|| GroupError::BadSeries("flag step is trivial".into()))?;
            basis.push(e);
        }
        // Coordinates via enumeration of all p^k combinations.
        let mut elem_of = vec![0u32; n];
        let mut coords_of = vec![vec![0u32; k]; n];
        for code in 0..n {
            let mut c = code;
            let mut x = 0u32;
            let mut coords = vec![0u32; k];
            for (j, &e) in basis.iter().enumerate() {
                let digit = (c % p) as u32;
                c /= p;
                coords[j] = digit;
                for _ in 0..digit {
                    x = section.mul(x, e);
                }
            }
            elem_of[code] = x;
            coords_of[x as usize] = coords;
        }
        let perm_from_map = |map: &dyn Fn(&[u32]) -> Vec<u32>| -> Perm {
            let images: Vec<u32> = (0..n as u32)
                .map(|x| {
                    let c = map(&coords_of[x as usize]);
                    let mut code = 0usize;
                    for j in (0..k).rev() {
                        code = code * p + c[j] as usize;
                    }
                    elem_of[code]
                })
                .collect();
            Perm::from_images(images).expect("linear bijection")
        };
        let mut gens: Vec<Perm> = Vec::new();
        if p > 2 {
            let root = (2..p as u32)
                .find(|&r| {
                    let mut x = 1u64;
                    (1..p - 1).all(|_| {
                        x = x * r as u64 % p as u64;
                        x != 1
                    })
                })
                .expect("prime field has a generator");
            for j in 0..k {
                gens.push(perm_from_map(&|c: &[u32]| {
                    let mut v = c.to_vec();
                    v[j] = (v[j] * root) % p as u32;
                    v
                }));
            }
        }
        for j in 1..k {
            // e_{j+1} -> e_{j+1} + e_j: coordinates transform by v[j-1] += v[j].
            gens.push(perm_from_map(&|c: &[u32]| {
                let mut v = c.to_vec();
                v[j - 1] = (v[j - 1] + v[j]) % p as u32;
                v
            }));
        }
        let group = PermGroup::from_generators_with_degree(n, gens)?.with_auto_witness();
        // Flag-stabilizing order: p^(k(k-1)/2) * (p-1)^k.
        let expected =
            BigUint::from(p).pow((k * (k - 1) / 2) as u32) * BigUint::from(p - 1).pow(k as u32);
        if group.order() != expected {
            return Err(EngineError::Contract(format!(
                "triangular group order {} != expected {}",
                group.order(),
                expected
            ))
            .into());
        }
        Ok((group, true))
    } else {
        // Nonabelian: the simple factors are minimal normal subgroups, one
        // per flag step; flag-fixing automorphisms act factorwise.
        let mins = minimal_normal_subgroups(section);
        let k = flags.len() - 1;
        let mut factors: Vec<Subgroup> = Vec::new();
        for j in 0..k {
            let upper = &flags[j];
            let lower = &flags[j + 1];
            let factor = mins
                .iter()
                .find(|m| {
                    m.elements().iter().all(|x| upper.binary_search(x).is_ok())
                        && m.elements().iter().any(|x| lower.binary_search(x).is_err())
                })
                .ok_or_else(|| {
                    GroupError::BadSeries("no minimal normal factor matches the flag step".into())
                })?;
            factors.push(factor.clone());
        }
        // Unique factorization x = u_1 * ... * u_k along the flag.
        let mut comp = vec![vec![0u32; k]; n];
        for x in 0..n as u32 {
            let mut y = x;
            for (j, factor) in factors.iter().enumerate() {
                let lower = &flags[j + 1];
                let u = factor
                    .elements()
                    .iter()
                    .copied()
                    .find(|&u| {
                        lower
                            .binary_search(&section.mul(section.inv(u), y))
                            .is_ok()
                    })
                    .ok_or_else(|| {
                        GroupError::BadSeries("flag step is not a direct factor".into())
                    })?;
                comp[x as usize][j] = u;
                y = section.mul(section.inv(u), y);
            }
        }
        let mut gens: Vec<Perm> = Vec::new();
        let mut expected = BigUint::one();
        for (j, factor) in factors.iter().enumerate() {
            let fg = factor.as_group("factor");
            let auts = homsearch::list_automorphisms(&fg);
            expected *= BigUint::from(auts.len());
            for psi in auts {
                let images: Vec<u32> = (0..n as u32)
                    .map(|x| {
                        let mut y = 0u32;
                        for (jj, f) in factors.iter().enumerate() {
                            let u = comp[x as usize][jj];
                            let mapped = if jj == j {
                                f.elements()[psi.apply(f.position_of(u).unwrap() as u32) as usize]
                            } else {
                                u
                            };
                            y = section.mul(y, mapped);
                        }
                        y
                    })
                    .collect();
                gens.push(Perm::from_images(images).expect("factorwise bijection"));
            }
        }
        let group = PermGroup::from_generators_with_degree(n, gens)?.with_auto_witness();
        if group.order() != expected {
            return Err(EngineError::Contract(format!(
                "factorwise automorphism group order {} != expected {}",
                group.order(),
                expected
            ))
            .into());
        }
        Ok((group, false))
    }
}

// ---------------------------------------------------------------------------
// Isomorphism matching fixed series
// ---------------------------------------------------------------------------

/// Result of a series-matching isomorphism query: either a witness
/// isomorphism together with the series-preserving automorphism group of the
/// first group (the full solution set is `autgroup` composed with `iso`), or
/// a definitive negative.
#[derive(Debug)]
pub enum IsoResult {
    NonIsomorphic,
    Isomorphic { iso: GroupHom, autgroup: PermGroup },
}

impl IsoResult {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoResult::Isomorphic { .. })
    }
}

/// Decides whether an isomorphism mapping `spec1`'s series onto `spec2`'s
/// exists, by running the bottom-up computation on the direct product with
/// the interleaved series and keeping only factor-fixing-or-switching
/// automorphisms.
pub fn comp_series_iso(spec1: &SeriesSpec, spec2: &SeriesSpec) -> Result<IsoResult, CsisoError> {
    comp_series_iso_with(spec1, spec2, EngineChoice::Auto)
}

pub fn comp_series_iso_with(
    spec1: &SeriesSpec,
    spec2: &SeriesSpec,
    engine: EngineChoice,
) -> Result<IsoResult, CsisoError> {
    require_composition_series(spec1)?;
    require_composition_series(spec2)?;
    let g1 = &spec1.group;
    let g2 = &spec2.group;
    if g1.order() != g2.order() || spec1.len() != spec2.len() {
        return Ok(IsoResult::NonIsomorphic);
    }
    for (t1, t2) in spec1.terms.iter().zip(&spec2.terms) {
        if t1.order() != t2.order() {
            return Ok(IsoResult::NonIsomorphic);
        }
    }
    let n2 = g2.order() as u32;
    let prod = direct_product(g1, g2);
    let p = &prod.group;
    let enc = |a: u32, b: u32| a * n2 + b;

    // Interleaved series and the per-level mixed factors.
    let mut terms: Vec<Subgroup> = Vec::new();
    let mut left: Vec<Subgroup> = Vec::new();
    let mut right: Vec<Subgroup> = Vec::new();
    for i in 0..spec1.len() {
        let mut elems: Vec<u32> = Vec::new();
        for &a in spec1.terms[i].elements() {
            for &b in spec2.terms[i].elements() {
                elems.push(enc(a, b));
            }
        }
        terms.push(Subgroup::new(p, elems)?);
        let next = (i + 1).min(spec1.len() - 1);
        let mut left_elems: Vec<u32> = Vec::new();
        for &a in spec1.terms[i].elements() {
            for &b in spec2.terms[next].elements() {
                left_elems.push(enc(a, b));
            }
        }
        let mut right_elems: Vec<u32> = Vec::new();
        for &a in spec1.terms[next].elements() {
            for &b in spec2.terms[i].elements() {
                right_elems.push(enc(a, b));
            }
        }
        left.push(Subgroup::new(p, left_elems)?);
        right.push(Subgroup::new(p, right_elems)?);
    }
    // Pure factors for the final extraction.
    let factor1: Vec<u32> = (0..g1.order() as u32).map(|a| enc(a, 0)).collect();
    let factor2: Vec<u32> = (0..n2).map(|b| enc(0, b)).collect();

    let fp = FactorPairs { left, right };
    let (solution, switchable) = bottom_up_over_terms(&terms, engine, Some(&fp))?;
    if !switchable {
        return Ok(IsoResult::NonIsomorphic);
    }
    let coset = set_transporter(&solution, &factor1, &factor2)?;
    let (coset_group, coset_rep) = match coset {
        crate::permgroup::GroupCoset::Empty => return Ok(IsoResult::NonIsomorphic),
        crate::permgroup::GroupCoset::Coset { group, rep } => (group, rep),
    };
    // Deterministic witness: the switching element with the smallest image
    // array, when the coset is small enough to enumerate.
    let switcher = match coset_group.elements(1 << 16) {
        Some(els) => els
            .into_iter()
            .map(|e| e.compose(&coset_rep))
            .min()
            .expect("nonempty coset"),
        None => coset_rep,
    };
    let iso_images: Vec<u32> = (0..g1.order() as u32)
        .map(|a| {
            let image = switcher.apply(enc(a, 0));
            debug_assert_eq!(image / n2, 0);
            image % n2
        })
        .collect();
    let iso = GroupHom::new(g1, g2, iso_images).map_err(CsisoError::Group)?;
    if !iso.is_bijective() {
        return Err(EngineError::Contract("extracted map is not bijective".into()).into());
    }
    for (t1, t2) in spec1.terms.iter().zip(&spec2.terms) {
        for &x in t1.elements() {
            if !t2.contains(iso.apply(x)) {
                return Err(
                    EngineError::Contract("extracted isomorphism breaks the series".into()).into(),
                );
            }
        }
    }

    // Series-preserving automorphisms of G1: the first-factor restriction of
    // the factor-stabilizing part of the solution.
    let stab = set_stabilizer(&solution, &factor1)?;
    let aut_gens: Vec<Perm> = stab
        .generators()
        .iter()
        .map(|e| {
            Perm::from_images(
                (0..g1.order() as u32)
                    .map(|a| {
                        let image = e.apply(enc(a, 0));
                        debug_assert_eq!(image % n2, 0);
                        image / n2
                    })
                    .collect(),
            )
            .expect("restriction of a factor stabilizer")
        })
        .collect();
    let autgroup = PermGroup::from_generators_with_degree(g1.order(), aut_gens)?;
    Ok(IsoResult::Isomorphic { iso, autgroup })
}

/// The fix-or-switch subgroup of the automorphisms of a section quotient
/// `Q = F1 x F2`: factorwise automorphism pairs, plus one switching map when
/// the factors are isomorphic.  `None` when no switching automorphism
/// exists, which settles the isomorphism query negatively.
fn fix_or_switch_auts(
    ctx: &crate::lifting::SectionContext,
    ambient: &Subgroup,
    left_upper: &Subgroup,
    right_upper: &Subgroup,
) -> Result<Option<PermGroup>, CsisoError> {
    let q = ctx.quotient();
    let proj = ctx.projection();
    let image_in_quotient = |sub: &Subgroup| -> Result<Subgroup, GroupError> {
        let mut v: Vec<u32> = sub
            .elements()
            .iter()
            .map(|&x| proj.apply(ambient.position_of(x).expect("factor inside ambient") as u32))
            .collect();
        v.sort_unstable();
        v.dedup();
        Subgroup::new(q, v)
    };
    let f1 = image_in_quotient(left_upper)?;
    let f2 = image_in_quotient(right_upper)?;
    if f1.order() * f2.order() != q.order() {
        return Err(
            EngineError::Contract("section is not the product of its factors".into()).into(),
        );
    }
    // Internal direct decomposition q = f1 * f2.
    let mut pair_of: Vec<(u32, u32)> = vec![(0, 0); q.order()];
    let mut seen = vec![false; q.order()];
    for &u in f1.elements() {
        for &v in f2.elements() {
            let x = q.mul(u, v);
            if seen[x as usize] {
                return Err(
                    EngineError::Contract("factors do not decompose the section".into()).into(),
                );
            }
            seen[x as usize] = true;
            pair_of[x as usize] = (u, v);
        }
    }
    let fg1 = f1.as_group("f1");
    let fg2 = f2.as_group("f2");
    let assemble = |map1: &dyn Fn(u32) -> u32, map2: &dyn Fn(u32) -> u32| -> Perm {
        Perm::from_images(
            (0..q.order() as u32)
                .map(|x| {
                    let (u, v) = pair_of[x as usize];
                    q.mul(map1(u), map2(v))
                })
                .collect(),
        )
        .expect("factorwise bijection")
    };
    let mut gens: Vec<Perm> = Vec::new();
    for psi in homsearch::list_automorphisms(&fg1) {
        gens.push(assemble(
            &|u| f1.elements()[psi.apply(f1.position_of(u).unwrap() as u32) as usize],
            &|v| v,
        ));
    }
    for psi in homsearch::list_automorphisms(&fg2) {
        gens.push(assemble(&|u| u, &|v| {
            f2.elements()[psi.apply(f2.position_of(v).unwrap() as u32) as usize]
        }));
    }
    // One switching map through an isomorphism F1 -> F2 and its inverse.
    let Some(theta) = homsearch::first_isomorphism(&fg1, &fg2) else {
        return Ok(None);
    };
    let mut theta_inv = vec![0u32; fg2.order()];
    for (i, &y) in theta.iter().enumerate() {
        theta_inv[y as usize] = i as u32;
    }
    let switch = Perm::from_images(
        (0..q.order() as u32)
            .map(|x| {
                let (u, v) = pair_of[x as usize];
                let u_img = f2.elements()[theta[f1.position_of(u).unwrap()] as usize];
                let v_img = f1.elements()[theta_inv[f2.position_of(v).unwrap() as usize] as usize];
                q.mul(v_img, u_img)
            })
            .collect(),
    )
    .expect("switching bijection");
    gens.push(switch);
    Ok(Some(
        PermGroup::from_generators_with_degree(q.order(), gens)?.with_auto_witness(),
    ))
}

// ---------------------------------------------------------------------------
// Series enumeration and full isomorphism
// ---------------------------------------------------------------------------

/// Maximal normal subgroups of a group: prime-index ones are hyperplane
/// preimages of the elementary abelian quotient per prime; for nonsolvable
/// groups, normal subgroups with simple nonabelian quotient are collected
/// from the normal lattice.
fn maximal_normal_subgroups(g: &GroupRef) -> Vec<Subgroup> {
    let n = g.order();
    let mut out: Vec<Subgroup> = Vec::new();
    let mut comms: Vec<u32> = Vec::new();
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            comms.push(g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b)));
        }
    }
    let derived = subgroup_generated(g, &comms).expect("commutators");
    let mut primes: Vec<usize> = Vec::new();
    let mut m = n;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for p in primes {
        // W = <derived, p-th powers>; the index-p maximal normals are the
        // hyperplane preimages of the elementary abelian G/W.
        let mut seeds: Vec<u32> = derived.elements().to_vec();
        for x in 0..n as u32 {
            let mut y = 0u32;
            for _ in 0..p {
                y = g.mul(y, x);
            }
            seeds.push(y);
        }
        let w = subgroup_generated(g, &seeds).expect("power closure");
        if w.order() == n {
            continue;
        }
        let (qp, proj) = quotient(g, &w).expect("power subgroup is characteristic");
        let mut basis: Vec<u32> = Vec::new();
        let mut span = subgroup_generated(&qp, &[]).unwrap();
        for x in 1..qp.order() as u32 {
            if !span.contains(x) {
                basis.push(x);
                let mut s: Vec<u32> = span.elements().to_vec();
                s.push(x);
                span = subgroup_generated(&qp, &s).unwrap();
            }
        }
        let k = basis.len();
        let mut coords = vec![vec![0u32; k]; qp.order()];
        for code in 0..qp.order() {
            let mut c = code;
            let mut x = 0u32;
            let mut v = vec![0u32; k];
            for (j, &e) in basis.iter().enumerate() {
                let digit = (c % p) as u32;
                c /= p;
                v[j] = digit;
                for _ in 0..digit {
                    x = qp.mul(x, e);
                }
            }
            coords[x as usize] = v;
        }
        // One functional per hyperplane: leading coefficient normalized to 1.
        let mut functional = vec![0u32; k];
        loop {
            let mut j = 0;
            loop {
                if j == k {
                    functional.clear();
                    break;
                }
                functional[j] += 1;
                if functional[j] < p as u32 {
                    break;
                }
                functional[j] = 0;
                j += 1;
            }
            if functional.is_empty() {
                break;
            }
            match functional.iter().rposition(|&c| c != 0) {
                Some(lead) if functional[lead] == 1 => {}
                _ => continue,
            }
            let kernel_elems: Vec<u32> = (0..qp.order() as u32)
                .filter(|&x| {
                    coords[x as usize]
                        .iter()
                        .zip(&functional)
                        .map(|(&a, &b)| a * b)
                        .sum::<u32>()
                        % p as u32
                        == 0
                })
                .collect();
            let kernel = Subgroup::new(&qp, kernel_elems).expect("hyperplane kernel");
            out.push(proj.preimage(&kernel).expect("preimage subgroup"));
        }
    }
    if !solvable_by_table(g) {
        for cand in normal_subgroups(g) {
            if cand.order() == n {
                continue;
            }
            let (quot, _) = quotient(g, &cand).expect("lattice members are normal");
            if quot.order() > 1 && !quot.is_abelian() && is_simple(&quot) {
                out.push(cand);
            }
        }
    }
    out.sort_by(|a, b| a.elements().cmp(b.elements()));
    out.dedup_by(|a, b| a.elements() == b.elements());
    out
}

fn solvable_by_table(g: &GroupRef) -> bool {
    let mut cur: Vec<u32> = (0..g.order() as u32).collect();
    loop {
        if cur.len() == 1 {
            return true;
        }
        let mut comms: Vec<u32> = Vec::new();
        for &a in &cur {
            for &b in &cur {
                comms.push(g.mul(g.mul(g.inv(a), g.inv(b)), g.mul(a, b)));
            }
        }
        let dsub = subgroup_generated(g, &comms).expect("commutators");
        if dsub.order() == cur.len() {
            return false;
        }
        cur = dsub.elements().to_vec();
    }
}

/// Depth-first enumeration of every composition series of `g`: at each level
/// all maximal normal subgroups of the current term, in deterministic order.
pub fn enumerate_composition_series(g: &GroupRef) -> Result<Vec<SeriesSpec>, CsisoError> {
    fn recurse(
        g: &GroupRef,
        chain: &mut Vec<Subgroup>,
        out: &mut Vec<Vec<Subgroup>>,
    ) -> Result<(), CsisoError> {
        let tail = chain.last().unwrap();
        if tail.order() == 1 {
            out.push(chain.clone());
            return Ok(());
        }
        let local = tail.as_group("t");
        let tail = tail.clone();
        for m in maximal_normal_subgroups(&local) {
            let parent_elems: Vec<u32> =
                m.elements().iter().map(|&x| tail.embed_index(x)).collect();
            let next = Subgroup::new(g, parent_elems)?;
            chain.push(next);
            recurse(g, chain, out)?;
            chain.pop();
        }
        Ok(())
    }
    let whole = Subgroup::new(g, (0..g.order() as u32).collect())?;
    let mut out: Vec<Vec<Subgroup>> = Vec::new();
    recurse(g, &mut vec![whole], &mut out)?;
    Ok(out
        .into_iter()
        .map(|terms| SeriesSpec {
            group: g.clone(),
            terms,
        })
        .collect())
}

/// The series-count bound `n^((1 + log_p n)/2)`, `p` the smallest prime
/// divisor of `n`.
pub fn series_count_bound(n: usize) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    let p = (2..=n).find(|d| n % d == 0).unwrap() as f64;
    let nf = n as f64;
    nf.powf((1.0 + nf.ln() / p.ln()) / 2.0)
}

/// Full isomorphism at desk scale: fix one composition series of `g2` and
/// try every series of `g1` against it.
pub fn full_iso(g1: &GroupRef, g2: &GroupRef) -> Result<IsoResult, CsisoError> {
    if g1.order() != g2.order() {
        return Ok(IsoResult::NonIsomorphic);
    }
    let fixed = enumerate_composition_series(g2)?
        .into_iter()
        .next()
        .ok_or_else(|| GroupError::BadSeries("no composition series found".into()))?;
    for series in enumerate_composition_series(g1)? {
        if let IsoResult::Isomorphic { iso, autgroup } = comp_series_iso(&series, &fixed)? {
            return Ok(IsoResult::Isomorphic { iso, autgroup });
        }
    }
    Ok(IsoResult::NonIsomorphic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn spec_of(name: &str, terms: Vec<Vec<u32>>) -> SeriesSpec {
        let g = oracle::catalog_group(name);
        SeriesSpec::new(&g, terms).unwrap()
    }

    fn s3_series() -> SeriesSpec {
        let g = oracle::catalog_group("S3");
        let a3: Vec<u32> = (0..6)
            .filter(|&x| x == 0 || g.element_order(x) == 3)
            .collect();
        SeriesSpec::new(&g, vec![(0..6).collect(), a3, vec![0]]).unwrap()
    }

    #[test]
    fn validation() {
        let g = oracle::catalog_group("C7");
        let spec = SeriesSpec::new(&g, vec![(0..7).collect(), vec![0]]).unwrap();
        assert!(validate_series(&spec).ok);

        let spec = spec_of("C4", vec![(0..4).collect(), vec![0, 2], vec![0]]);
        assert!(validate_series(&spec).ok);

        // S3 over a non-normal subgroup is rejected.
        let g = oracle::catalog_group("S3");
        let t = (1..6).find(|&x| g.element_order(x) == 2).unwrap();
        let spec = SeriesSpec::new(&g, vec![(0..6).collect(), vec![0, t], vec![0]]).unwrap();
        let report = validate_series(&spec);
        assert!(!report.ok);
        assert!(report.violation.unwrap().contains("normal"));

        // Non-maximal steps flunk the simplicity check.
        let spec = spec_of("C4", vec![(0..4).collect(), vec![0]]);
        assert!(!validate_series(&spec).ok);
    }

    #[test]
    fn bottom_up_small_cases() {
        let out = bottom_up_auto(&s3_series()).unwrap();
        assert_eq!(out.order(), BigUint::from(6u32));

        let spec = spec_of("C4", vec![(0..4).collect(), vec![0, 2], vec![0]]);
        let out = bottom_up_auto(&spec).unwrap();
        assert_eq!(out.order(), BigUint::from(2u32));

        let spec = spec_of("C2xC2", vec![(0..4).collect(), vec![0, 2], vec![0]]);
        let out = bottom_up_auto(&spec).unwrap();
        assert_eq!(out.order(), BigUint::from(2u32));
    }

    #[test]
    fn bottom_up_matches_oracle_on_small_fixtures() {
        for name in ["C6", "C8", "D4", "Q8", "A4"] {
            let g = oracle::catalog_group(name);
            for spec in enumerate_composition_series(&g).unwrap() {
                let solver = bottom_up_auto(&spec).unwrap();
                let brute = oracle::aut_fixing_series(&g, &spec.term_elements());
                assert_eq!(
                    solver.order(),
                    BigUint::from(brute.len()),
                    "{name} series {:?}",
                    spec.term_elements()
                );
                for p in &brute {
                    assert!(solver.contains(p));
                }
            }
        }
    }

    #[test]
    fn characteristic_refinement_cases() {
        // Characteristically simple group: single gap, refinement = spec.
        let g = oracle::catalog_group("C7");
        let spec = SeriesSpec::new(&g, vec![(0..7).collect(), vec![0]]).unwrap();
        let (chars, refined, _) = characteristic_refinement(&spec).unwrap();
        assert_eq!(chars.terms.len(), 2);
        assert_eq!(refined.term_elements(), spec.term_elements());

        // C4: the characteristic series passes through C2.
        let spec = spec_of("C4", vec![(0..4).collect(), vec![0, 2], vec![0]]);
        let (chars, refined, _) = characteristic_refinement(&spec).unwrap();
        assert_eq!(chars.terms.len(), 3);
        assert_eq!(chars.terms[1].elements(), &[0, 2]);
        assert_eq!(refined.term_elements(), spec.term_elements());

        // S3: the characteristic series runs through A3.
        let (chars, _, _) = characteristic_refinement(&s3_series()).unwrap();
        assert_eq!(chars.terms.len(), 3);
        assert_eq!(chars.terms[1].order(), 3);

        // Characteristic terms are invariant under the full automorphism
        // group (spot check).
        for name in ["C4", "D4", "Q8", "C2xC4"] {
            let g = oracle::catalog_group(name);
            let spec = enumerate_composition_series(&g).unwrap().remove(0);
            let (chars, _, _) = characteristic_refinement(&spec).unwrap();
            for aut in oracle::all_automorphisms(&g) {
                for t in &chars.terms {
                    assert!(t.elements().iter().all(|&x| t.contains(aut.apply(x))));
                }
            }
        }
    }

    #[test]
    fn top_down_agrees_with_bottom_up() {
        for name in ["C6", "C8", "C2xC4", "D4", "Q8", "A4", "Dic3"] {
            let g = oracle::catalog_group(name);
            for spec in enumerate_composition_series(&g).unwrap() {
                let bu = bottom_up_auto(&spec).unwrap();
                let td = top_down_auto(&spec).unwrap();
                assert_eq!(bu.order(), td.order(), "{name}");
                for gen in td.generators() {
                    assert!(bu.contains(gen), "{name}");
                }
            }
        }
    }

    #[test]
    fn top_down_q8_chain_matches_oracle() {
        let g = oracle::catalog_group("Q8");
        for spec in enumerate_composition_series(&g).unwrap() {
            let td = top_down_auto(&spec).unwrap();
            let brute = oracle::aut_fixing_series(&g, &spec.term_elements());
            assert_eq!(td.order(), BigUint::from(brute.len()));
        }
    }

    #[test]
    fn series_enumeration_counts() {
        assert_eq!(
            enumerate_composition_series(&oracle::catalog_group("C8"))
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            enumerate_composition_series(&oracle::catalog_group("C2xC2"))
                .unwrap()
                .len(),
            3
        );
        assert_eq!(
            enumerate_composition_series(&oracle::catalog_group("S3"))
                .unwrap()
                .len(),
            1
        );
        // C2^3: the 21 complete flags of F_2^3.
        assert_eq!(
            enumerate_composition_series(&oracle::catalog_group("C2xC2xC2"))
                .unwrap()
                .len(),
            21
        );
        for spec in enumerate_composition_series(&oracle::catalog_group("S4")).unwrap() {
            assert!(validate_series(&spec).ok);
        }
    }

    #[test]
    fn iso_same_spec_is_isomorphic() {
        let spec = s3_series();
        match comp_series_iso(&spec, &spec).unwrap() {
            IsoResult::Isomorphic { iso, autgroup } => {
                assert!(iso.is_bijective());
                assert_eq!(autgroup.order(), BigUint::from(6u32));
            }
            IsoResult::NonIsomorphic => panic!("same series must match"),
        }
    }

    #[test]
    fn iso_rejects_different_groups() {
        let c4 = spec_of("C4", vec![(0..4).collect(), vec![0, 2], vec![0]]);
        let v4 = spec_of("C2xC2", vec![(0..4).collect(), vec![0, 2], vec![0]]);
        assert!(!comp_series_iso(&c4, &v4).unwrap().is_isomorphic());
    }

    #[test]
    fn iso_solution_counts_match_oracle() {
        // Two different-looking order-12 tables of the same group.
        let d1 = oracle::catalog_group("Dic3");
        let d2 = oracle::catalog_group("C3:C4");
        let s1 = enumerate_composition_series(&d1).unwrap();
        let s2 = enumerate_composition_series(&d2).unwrap();
        let mut found = false;
        for a in &s1 {
            for b in &s2 {
                let result = comp_series_iso(a, b).unwrap();
                let brute =
                    oracle::iso_matching_series(&d1, &a.term_elements(), &d2, &b.term_elements());
                assert_eq!(result.is_isomorphic(), !brute.is_empty());
                if let IsoResult::Isomorphic { iso, autgroup } = result {
                    found = true;
                    assert!(brute.contains(&iso.image_array().to_vec()));
                    assert_eq!(autgroup.order(), BigUint::from(brute.len()));
                }
            }
        }
        assert!(found, "Dic3 and C3:C4 are isomorphic");
    }

    #[test]
    fn full_iso_examples() {
        let g = oracle::catalog_group("S3");
        assert!(full_iso(&g, &g).unwrap().is_isomorphic());
        assert!(
            !full_iso(&oracle::catalog_group("C4"), &oracle::catalog_group("C2xC2"))
                .unwrap()
                .is_isomorphic()
        );
        assert!(
            !full_iso(&oracle::catalog_group("D4"), &oracle::catalog_group("Q8"))
                .unwrap()
                .is_isomorphic()
        );
        assert!(
            full_iso(&oracle::catalog_group("Dic3"), &oracle::catalog_group("C3:C4"))
                .unwrap()
                .is_isomorphic()
        );
    }

    #[test]
    fn count_bound_holds_on_catalog() {
        for (name, g) in oracle::catalog() {
            let count = enumerate_composition_series(&g).unwrap().len() as f64;
            assert!(
                count <= series_count_bound(g.order()) + 1e-9,
                "{name}: {count} series"
            );
        }
    }
}
