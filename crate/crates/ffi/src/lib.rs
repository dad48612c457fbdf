//! C ABI over `rnn-automata`.
//!
//! Networks are opaque `RaNetwork` handles created by `ra_network_from_json`
//! or `ra_network_compile` and released with `ra_network_free`. Every
//! fallible call returns an `RaStatus`; the message of the most recent
//! failure on the calling thread is available from `ra_last_error`.
//! Strings returned through out-parameters are owned by the caller and
//! released with `ra_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

use rnn_automata::cli::{cmd_compile, CompileKind, CompileOptions, Network};
use rnn_automata::Error;

/// Status codes. `RA_OK` is zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RaStatus {
    RaOk = 0,
    RaNullPointer = 1,
    RaInvalidUtf8 = 2,
    RaParse = 3,
    RaUnknownSymbol = 4,
    RaInvalidNetwork = 5,
    /// `k` too small, degenerate or cancelling infinite gates, singular
    /// matrices, domain errors.
    RaNumeric = 6,
    RaPrecondition = 7,
    RaIo = 8,
    RaPanic = 9,
}

/// Opaque network handle.
pub struct RaNetwork(Network);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RaStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => RaStatus::RaParse,
        Error::UnknownSymbol(_) => RaStatus::RaUnknownSymbol,
        Error::DimensionMismatch(_)
        | Error::InvalidDfa(_)
        | Error::AlphabetMismatch(_)
        | Error::NegativeOutput(_) => RaStatus::RaInvalidNetwork,
        Error::Io(_) => RaStatus::RaIo,
        _ if e.exit_code() == 3 => RaStatus::RaNumeric,
        _ => RaStatus::RaPrecondition,
    }
}

fn guard(f: impl FnOnce() -> Result<(), RaStatus>) -> RaStatus {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(Ok(())) => RaStatus::RaOk,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RaStatus::RaPanic
        }
    }
}

fn fail(e: Error) -> RaStatus {
    set_error(&e.to_string());
    status_of(&e)
}

/// # Safety
/// `p` is null or a NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, RaStatus> {
    if p.is_null() {
        set_error(&format!("{what} is null"));
        return Err(RaStatus::RaNullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(&format!("{what} is not valid UTF-8"));
        RaStatus::RaInvalidUtf8
    })
}

/// # Safety
/// `out` is null or writable.
unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), RaStatus> {
    if out.is_null() {
        set_error("output pointer is null");
        return Err(RaStatus::RaNullPointer);
    }
    *out = CString::new(s).unwrap_or_default().into_raw();
    Ok(())
}

/// # Safety
/// `out` is null or writable.
unsafe fn put_network(out: *mut *mut RaNetwork, net: Network) -> Result<(), RaStatus> {
    if out.is_null() {
        set_error("output pointer is null");
        return Err(RaStatus::RaNullPointer);
    }
    *out = Box::into_raw(Box::new(RaNetwork(net)));
    Ok(())
}

/// # Safety
/// `net` is null or a live handle.
unsafe fn network<'a>(net: *const RaNetwork) -> Result<&'a Network, RaStatus> {
    if net.is_null() {
        set_error("network handle is null");
        return Err(RaStatus::RaNullPointer);
    }
    Ok(&(*net).0)
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ra_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a weights file's contents.
///
/// # Safety
/// `json` is a NUL-terminated string and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ra_network_from_json(json: *const c_char, out: *mut *mut RaNetwork) -> RaStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let net = Network::from_json_str(text).map_err(fail)?;
        put_network(out, net)
    })
}

/// Compiles a network. `kind` is one of `dfa-rnn`, `dyck-rnn`, `cfl-rnn`,
/// `dfa-gru`, `dyck-gru`, `cfl-gru`; `spec_json` is the DFA or CFL spec
/// (null for the Dyck kinds). Zero for `n`, `k`, `precision` or `max_len`
/// selects the command-line default.
///
/// # Safety
/// `kind` is a NUL-terminated string, `spec_json` is null or one, and `out`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn ra_network_compile(
    kind: *const c_char,
    spec_json: *const c_char,
    n: usize,
    k: u32,
    precision: u32,
    max_len: usize,
    out: *mut *mut RaNetwork,
) -> RaStatus {
    guard(|| {
        let kind: CompileKind = read_str(kind, "kind")?.parse().map_err(fail)?;
        let spec = if spec_json.is_null() {
            None
        } else {
            Some(read_str(spec_json, "spec")?)
        };
        let nz = |v: usize| (v != 0).then_some(v);
        let opts = CompileOptions {
            n: nz(n),
            k: (k != 0).then_some(k),
            precision: (precision != 0).then_some(precision),
            max_len: nz(max_len),
        };
        let net = cmd_compile(kind, spec, &opts).map_err(fail)?;
        put_network(out, net)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `net` is null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ra_network_free(net: *mut RaNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of hidden nodes, or 0 for a null handle.
///
/// # Safety
/// `net` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ra_network_hidden_size(net: *const RaNetwork) -> usize {
    network(net).map_or(0, |n| n.hidden_size())
}

/// Serializes a network to its weights-file JSON.
///
/// # Safety
/// `net` is a live handle and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn ra_network_to_json(net: *const RaNetwork, out: *mut *mut c_char) -> RaStatus {
    guard(|| {
        let net = network(net)?;
        put_string(out, net.to_json_string())
    })
}

/// Runs a word given as whitespace-separated symbols. Writes the verdict to
/// `accept` and, if `output` is not null, the final output as a string.
///
/// # Safety
/// `net` is a live handle, `word` a NUL-terminated string, `accept`
/// writable, and `output` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ra_network_run(
    net: *const RaNetwork,
    word: *const c_char,
    accept: *mut bool,
    output: *mut *mut c_char,
) -> RaStatus {
    guard(|| {
        let net = network(net)?;
        let w = net.alphabet().parse_word(read_str(word, "word")?).map_err(fail)?;
        let v = net.run(&w).map_err(fail)?;
        if accept.is_null() {
            set_error("accept pointer is null");
            return Err(RaStatus::RaNullPointer);
        }
        *accept = v.accept;
        if !output.is_null() {
            put_string(output, v.output)?;
        }
        Ok(())
    })
}

/// Per-step trace table followed by the verdict line, as printed by the
/// `trace` command.
///
/// # Safety
/// `net` is a live handle, `word` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ra_network_trace(net: *const RaNetwork, word: *const c_char, out: *mut *mut c_char) -> RaStatus {
    guard(|| {
        let net = network(net)?;
        let w = net.alphabet().parse_word(read_str(word, "word")?).map_err(fail)?;
        put_string(out, net.trace(&w).map_err(fail)?)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string returned through an out-parameter of this
/// library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ra_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

