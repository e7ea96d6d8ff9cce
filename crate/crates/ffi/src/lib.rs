//! C interface to the nucsp emission library.
//!
//! Objects cross the boundary as opaque heap handles created by a `*_new`
//! function and released by the matching `*_free`. Every fallible call
//! returns a [`NucspStatus`] and writes its result through an out pointer;
//! on failure a description is available from [`nucsp_last_error`] on the
//! same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nucsp::crystal_sp::{layer_yield, CutoffPolicy, LatticeFilm, LatticeRegistry};
use nucsp::nuclide::{coherent_fraction, radiative_rate};
use nucsp::{brems, numerics, single_nucleus, Error, NuclideRecord, NuclideRegistry, Probe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NucspStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Convergence = 3,
    NotFound = 4,
    InvalidUtf8 = 5,
    Panic = 6,
    Io = 7,
}

/// Opaque nuclide record.
pub struct NucspNuclide(NuclideRecord);

/// Opaque probe.
pub struct NucspProbe(Probe);

/// Opaque crystal film.
pub struct NucspFilm(LatticeFilm);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> NucspStatus {
    match err {
        Error::Domain(_) | Error::DataFile { .. } | Error::Table(_) => NucspStatus::Domain,
        Error::Convergence { .. } => NucspStatus::Convergence,
        Error::UnknownName { .. } => NucspStatus::NotFound,
        Error::Io { .. } => NucspStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status code.
fn guard<F>(f: F) -> NucspStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NucspStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(&e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(&format!("null pointer: {what}"));
            NucspStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("string argument is not valid UTF-8");
            NucspStatus::InvalidUtf8
        }
        Err(_) => {
            set_last_error("internal panic");
            NucspStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn str_arg<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Utf8)
}

/// Message describing the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next failing call on the
/// same thread.
#[no_mangle]
pub extern "C" fn nucsp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nucsp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Looks up a built-in nuclide such as `"Fe-57"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_nuclide_from_name(name: *const c_char, out: *mut *mut NucspNuclide) -> NucspStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let rec = NuclideRegistry::builtin().get(name)?.clone();
        write(out, Box::into_raw(Box::new(NucspNuclide(rec))), "out")
    })
}

/// Creates a nuclide from its parameters. Spins are doubled.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_nuclide_new(
    name: *const c_char,
    e0_kev: f64,
    lifetime_s: f64,
    alpha_ic: f64,
    jg2: i32,
    je2: i32,
    branch_divisor: f64,
    out: *mut *mut NucspNuclide,
) -> NucspStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let rec = NuclideRecord::new(name, e0_kev, lifetime_s, alpha_ic, jg2, je2, branch_divisor)?;
        write(out, Box::into_raw(Box::new(NucspNuclide(rec))), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from a nuclide constructor, freed once.
#[no_mangle]
pub unsafe extern "C" fn nucsp_nuclide_free(p: *mut NucspNuclide) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Coherent radiative decay rate, 1/s.
///
/// # Safety
/// `n` must be a live nuclide handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_radiative_rate(n: *const NucspNuclide, out: *mut f64) -> NucspStatus {
    guard(|| {
        let n = deref(n, "nuclide")?;
        write(out, radiative_rate(&n.0)?, "out")
    })
}

/// Exact coherent fraction for doubled spins `jg2 -> je2`, as a reduced
/// fraction.
///
/// # Safety
/// `num` and `den` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_coherent_fraction(jg2: i32, je2: i32, num: *mut i64, den: *mut i64) -> NucspStatus {
    guard(|| {
        let f = coherent_fraction(jg2, je2)?;
        let n = i64::try_from(*f.numer()).map_err(|_| Error::Domain("numerator overflows i64".into()))?;
        let d = i64::try_from(*f.denom()).map_err(|_| Error::Domain("denominator overflows i64".into()))?;
        write(num, n, "num")?;
        write(den, d, "den")
    })
}

/// Creates a probe of charge `z_charge` e, rest energy in eV, speed `beta` c.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_probe_new(z_charge: i32, rest_energy_ev: f64, beta: f64, out: *mut *mut NucspProbe) -> NucspStatus {
    guard(|| {
        let p = Probe::new(z_charge, rest_energy_ev, beta)?;
        write(out, Box::into_raw(Box::new(NucspProbe(p))), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from [`nucsp_probe_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn nucsp_probe_free(p: *mut NucspProbe) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Coherent single-nucleus photon yield at transverse distance `r_perp_nm`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_coherent_yield(
    probe: *const NucspProbe,
    nuclide: *const NucspNuclide,
    r_perp_nm: f64,
    out: *mut f64,
) -> NucspStatus {
    guard(|| {
        let p = deref(probe, "probe")?;
        let n = deref(nuclide, "nuclide")?;
        write(out, single_nucleus::coherent_yield(&p.0, &n.0, r_perp_nm)?, "out")
    })
}

/// Looks up a lattice preset (`"sc100"`, `"bcc100"`, `"fcc100"`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_film_from_preset(name: *const c_char, n_layers: u32, out: *mut *mut NucspFilm) -> NucspStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let film = LatticeRegistry::builtin().get(name)?.clone().with_layers(n_layers);
        write(out, Box::into_raw(Box::new(NucspFilm(film))), "out")
    })
}

/// Creates a film with square period `a_nm` and interlayer displacement
/// `(b_x, b_y, b_z)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_film_new(
    a_nm: f64,
    b_x_nm: f64,
    b_y_nm: f64,
    b_z_nm: f64,
    n_layers: u32,
    out: *mut *mut NucspFilm,
) -> NucspStatus {
    guard(|| {
        let film = LatticeFilm::new("custom", a_nm, [b_x_nm, b_y_nm], b_z_nm)?.with_layers(n_layers);
        write(out, Box::into_raw(Box::new(NucspFilm(film))), "out")
    })
}

/// # Safety
/// `p` must be null or a film handle, freed once.
#[no_mangle]
pub unsafe extern "C" fn nucsp_film_free(p: *mut NucspFilm) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Photon yield per atomic layer and per squared probe charge, summed over
/// every emission cone, with a hard reciprocal cutoff at `1 / r_min_nm`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_layer_yield(
    probe: *const NucspProbe,
    nuclide: *const NucspNuclide,
    film: *const NucspFilm,
    r_min_nm: f64,
    out: *mut f64,
) -> NucspStatus {
    guard(|| {
        let p = deref(probe, "probe")?;
        let n = deref(nuclide, "nuclide")?;
        let f = deref(film, "film")?;
        let policy = CutoffPolicy::hard(r_min_nm)?;
        write(out, layer_yield(&p.0, &n.0, &f.0, &policy)?.total_per_layer_per_z2, "out")
    })
}

/// Bremsstrahlung probability within `window_ev` around `center_ev`.
///
/// # Safety
/// `probe` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_br_window_yield(
    probe: *const NucspProbe,
    z_nucleus: u32,
    r_perp_nm: f64,
    center_ev: f64,
    window_ev: f64,
    out: *mut f64,
) -> NucspStatus {
    guard(|| {
        let p = deref(probe, "probe")?;
        write(
            out,
            brems::br_window_yield(&p.0, z_nucleus, r_perp_nm, center_ev, window_ev)?,
            "out",
        )
    })
}

/// Modified Bessel function K0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_bessel_k0(x: f64, out: *mut f64) -> NucspStatus {
    guard(|| write(out, numerics::bessel_k0(x)?, "out"))
}

/// Modified Bessel function K1.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nucsp_bessel_k1(x: f64, out: *mut f64) -> NucspStatus {
    guard(|| write(out, numerics::bessel_k1(x)?, "out"))
}
