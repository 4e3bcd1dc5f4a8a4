//! C interface to the giant-atom library.
//!
//! Objects are opaque handles created by `gb_*_new` functions and released
//! with the matching `gb_*_free`. Every fallible call returns a `GbStatus`;
//! on failure the message is available from `gb_last_error_message` on the
//! same thread. Output arrays are caller-allocated; calls that fill them take
//! a capacity and report the number of elements needed.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use giantbic::bic_subspace::build_p_state;
use giantbic::dynamics::{evolve_observables, initial_atom_excited};
use giantbic::experiment::with_imperfections;
use giantbic::lattice::{classify_states, solve, ClassifyThresholds, LatticeConfig, StateKind, UniformGiantAtomLayout};
use giantbic::spectral::{design_oscillating_bic, predict_boc, BicDesign, DesignBranch};
use giantbic::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbStatus {
    Ok = 0,
    NullPointer = 1,
    Config = 2,
    Domain = 3,
    Numerical = 4,
    Analysis = 5,
    Io = 6,
    Panic = 7,
    BufferTooSmall = 8,
}

/// Classification of an eigenstate, as returned by `gb_lattice_spectrum`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbStateKind {
    Continuum = 0,
    Bic = 1,
    Boc = 2,
    Decoupled = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbInitialState {
    Atom = 0,
    PState = 1,
}

/// Scalar summary of a design.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbDesignInfo {
    pub points: usize,
    pub spacing: usize,
    pub hopping: f64,
    pub omega_bic: f64,
    pub rho0: f64,
    pub phi_bic_sq: f64,
    pub tau: f64,
    pub gamma_inv: f64,
    pub nm_ratio: f64,
    pub osc_frequency: f64,
    pub period: f64,
    /// 0 for n0 divisible by 4, 2 for the M = 3, n0 = 4l + 2 branch.
    pub spacing_mod4: u32,
}

/// Out-of-band bound states; index 0 is below the band.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbBocInfo {
    pub energies: [f64; 2],
    pub energies_asymptotic: [f64; 2],
    pub emitter_probability: [f64; 2],
    pub emitter_probability_asymptotic: f64,
}

/// Opaque oscillating-BIC design.
pub struct GbDesign {
    inner: BicDesign,
}

/// Opaque finite lattice with its atom couplings.
pub struct GbLattice {
    /// Configuration including imperfections, used for dynamics and spectra.
    config: LatticeConfig,
    /// Imperfection-free configuration, used to build BIC states.
    ideal: LatticeConfig,
    design: Option<BicDesign>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> GbStatus {
    match err {
        Error::Config(_) => GbStatus::Config,
        Error::Domain(_) => GbStatus::Domain,
        Error::Numerical(_) => GbStatus::Numerical,
        Error::Analysis(_) => GbStatus::Analysis,
        Error::Io(_) | Error::Json(_) => GbStatus::Io,
    }
}

enum Failure {
    Status(GbStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(GbStatus::NullPointer, format!("{what} is null"))
}

/// Run `f`, translating errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GbStatus::Ok
        }
        Ok(Err(Failure::Status(status, msg))) => {
            set_error(msg);
            status
        }
        Ok(Err(Failure::Lib(err))) => {
            set_error(err.to_string());
            status_of(&err)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            GbStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length without the NUL,
/// or 0 when there is no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => {
            if !buf.is_null() && len > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Design the oscillating-BIC atom with `points` coupling points spaced by `spacing`.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle owned by the caller.
#[no_mangle]
pub unsafe extern "C" fn gb_design_new(points: usize, spacing: usize, hopping: f64, out: *mut *mut GbDesign) -> GbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = design_oscillating_bic(points, spacing, hopping)?;
        *out = Box::into_raw(Box::new(GbDesign { inner }));
        Ok(())
    })
}

/// # Safety
/// `design` must be null or a handle from `gb_design_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gb_design_free(design: *mut GbDesign) {
    if !design.is_null() {
        drop(Box::from_raw(design));
    }
}

/// # Safety
/// `design` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_design_info(design: *const GbDesign, out: *mut GbDesignInfo) -> GbStatus {
    guard(|| {
        let d = &deref(design, "design")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = GbDesignInfo {
            points: d.points,
            spacing: d.spacing,
            hopping: d.hopping,
            omega_bic: d.omega_bic,
            rho0: d.rho0,
            phi_bic_sq: d.phi_bic_sq,
            tau: d.tau,
            gamma_inv: d.gamma_inv,
            nm_ratio: d.nm_ratio,
            osc_frequency: d.osc_frequency,
            period: d.period,
            spacing_mod4: match d.branch {
                DesignBranch::Mod4Zero => 0,
                DesignBranch::Mod4Two => 2,
            },
        };
        Ok(())
    })
}

/// # Safety
/// `design` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_design_boc(design: *const GbDesign, out: *mut GbBocInfo) -> GbStatus {
    guard(|| {
        let d = &deref(design, "design")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = predict_boc(d)?;
        *out = GbBocInfo {
            energies: b.energies,
            energies_asymptotic: b.energies_asymptotic,
            emitter_probability: b.emitter_probability,
            emitter_probability_asymptotic: b.emitter_probability_asymptotic,
        };
        Ok(())
    })
}

fn boxed_lattice(
    out: *mut *mut GbLattice,
    ideal: LatticeConfig,
    ratio: f64,
    design: Option<BicDesign>,
) -> Result<(), Failure> {
    let config = if ratio > 0.0 {
        with_imperfections(&ideal, ratio)?
    } else {
        ideal.clone()
    };
    unsafe {
        *out = Box::into_raw(Box::new(GbLattice { config, ideal, design }));
    }
    Ok(())
}

/// Chain of `sites` sites carrying the design centred in it, with
/// rho1/rho0 = J'/J = `imperfection_ratio`.
///
/// # Safety
/// `design` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_lattice_from_design(
    design: *const GbDesign,
    sites: usize,
    imperfection_ratio: f64,
    out: *mut *mut GbLattice,
) -> GbStatus {
    guard(|| {
        let d = deref(design, "design")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        let ideal = LatticeConfig::uniform(sites, d.hopping, 0.0, &d.layout(1).centered_in(sites))?;
        boxed_lattice(out, ideal, imperfection_ratio, Some(d))
    })
}

/// Chain with `points` couplings of strength `rho0` spaced by `spacing`,
/// the first at 1-based site `offset`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gb_lattice_new(
    sites: usize,
    hopping: f64,
    detuning: f64,
    points: usize,
    spacing: usize,
    rho0: f64,
    offset: usize,
    out: *mut *mut GbLattice,
) -> GbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let layout = UniformGiantAtomLayout::new(points, spacing, rho0, offset);
        let ideal = LatticeConfig::uniform(sites, hopping, detuning, &layout)?;
        boxed_lattice(out, ideal, 0.0, None)
    })
}

/// # Safety
/// `lattice` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gb_lattice_free(lattice: *mut GbLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Number of lattice sites, or 0 for a null handle.
///
/// # Safety
/// `lattice` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gb_lattice_sites(lattice: *const GbLattice) -> usize {
    lattice.as_ref().map_or(0, |l| l.config.sites)
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn check_capacity(needed: usize, capacity: usize) -> Result<(), Failure> {
    if capacity < needed {
        return Err(Failure::Status(
            GbStatus::BufferTooSmall,
            format!("buffers hold {capacity} elements; {needed} are needed"),
        ));
    }
    Ok(())
}

/// Eigenvalues (ascending), emitter probabilities and kinds of every
/// eigenstate. `*count` receives N + 1; if `capacity` is smaller nothing is
/// written and `GB_STATUS_BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `lattice` must be a live handle, `count` valid, and each array must hold
/// `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn gb_lattice_spectrum(
    lattice: *const GbLattice,
    energies: *mut f64,
    emitter_probabilities: *mut f64,
    kinds: *mut GbStateKind,
    capacity: usize,
    count: *mut usize,
) -> GbStatus {
    guard(|| {
        let l = deref(lattice, "lattice")?;
        if count.is_null() {
            return Err(null("count"));
        }
        *count = l.config.dim();
        check_capacity(l.config.dim(), capacity)?;
        let (e, p, k) = (
            out_slice(energies, capacity, "energies")?,
            out_slice(emitter_probabilities, capacity, "emitter_probabilities")?,
            out_slice(kinds, capacity, "kinds")?,
        );
        let (_, spectrum) = solve(&l.config)?;
        for (i, r) in classify_states(&spectrum, &l.config, ClassifyThresholds::default()).iter().enumerate() {
            e[i] = r.energy;
            p[i] = r.emitter_probability;
            k[i] = match r.kind {
                StateKind::Continuum => GbStateKind::Continuum,
                StateKind::Bic => GbStateKind::Bic,
                StateKind::Boc => GbStateKind::Boc,
                StateKind::Decoupled => GbStateKind::Decoupled,
            };
        }
        Ok(())
    })
}

/// Atom probability and leakage at `n_times` sorted times. `initial` is a
/// `GbInitialState` value; `GB_INITIAL_STATE_P_STATE` needs a lattice built
/// from a design. `leakage` may be null.
///
/// # Safety
/// `lattice` must be a live handle; `times` and `prob_atom` (and `leakage`
/// if non-null) must hold `n_times` elements.
#[no_mangle]
pub unsafe extern "C" fn gb_lattice_evolve(
    lattice: *const GbLattice,
    initial: u32,
    times: *const f64,
    n_times: usize,
    prob_atom: *mut f64,
    leakage: *mut f64,
) -> GbStatus {
    guard(|| {
        let l = deref(lattice, "lattice")?;
        if times.is_null() {
            return Err(null("times"));
        }
        let times = std::slice::from_raw_parts(times, n_times);
        let prob = out_slice(prob_atom, n_times, "prob_atom")?;
        let psi0 = match initial {
            x if x == GbInitialState::Atom as u32 => initial_atom_excited(&l.config),
            x if x == GbInitialState::PState as u32 => {
                let design = l.design.as_ref().ok_or_else(|| {
                    Failure::Status(GbStatus::Config, "the p state needs a lattice built from a design".into())
                })?;
                build_p_state(design, &l.ideal)?.state
            }
            other => {
                return Err(Failure::Status(GbStatus::Config, format!("unknown initial state {other}")));
            }
        };
        let (_, spectrum) = solve(&l.config)?;
        let ts = evolve_observables(&spectrum, &psi0, times, &l.config, &[])?;
        prob.copy_from_slice(&ts.prob_atom);
        if !leakage.is_null() {
            let leak = std::slice::from_raw_parts_mut(leakage, n_times);
            match &ts.leakage {
                Some(v) => leak.copy_from_slice(v),
                None => leak.fill(0.0),
            }
        }
        Ok(())
    })
}

/// Preparation table of |p>: 1-based sites and complex amplitudes of every
/// site above the amplitude floor. `*count` receives the table length.
///
/// # Safety
/// `lattice` must be a live handle built from a design, `count` valid, and
/// each array must hold `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn gb_lattice_p_state(
    lattice: *const GbLattice,
    sites: *mut usize,
    re: *mut f64,
    im: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> GbStatus {
    guard(|| {
        let l = deref(lattice, "lattice")?;
        if count.is_null() {
            return Err(null("count"));
        }
        let design = l.design.as_ref().ok_or_else(|| {
            Failure::Status(GbStatus::Config, "the p state needs a lattice built from a design".into())
        })?;
        let table = build_p_state(design, &l.ideal)?.table;
        *count = table.len();
        check_capacity(table.len(), capacity)?;
        let (s, r, i) = (
            out_slice(sites, capacity, "sites")?,
            out_slice(re, capacity, "re")?,
            out_slice(im, capacity, "im")?,
        );
        for (k, e) in table.iter().enumerate() {
            s[k] = e.site;
            r[k] = e.re;
            i[k] = e.im;
        }
        Ok(())
    })
}
