//! Persistence behavior of the coincidence-limit tables: round-tripping,
//! warm-cache reuse (no rebuilds), and the failure modes of a present but
//! unusable cache file — wrong format version, corrupted content, malformed
//! body. A present-but-invalid file must surface as an error, never as a
//! silent rebuild.

use std::fs;
use std::path::Path;
use std::sync::Mutex;

use heatkernel::colim::{build_calls, ColimError, CoinLimitTable, LimitFn, LimitTables};
use sha2::{Digest, Sha256};

/// `build_calls()` is process-global, so every test that observes counter
/// deltas (or builds tables at all) serializes through this lock.
static COUNTER_GATE: Mutex<()> = Mutex::new(());

fn gate() -> std::sync::MutexGuard<'static, ()> {
    COUNTER_GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Rewrites a saved cache file with `tamper` applied to its body, restamping
/// the content hash so only the tampering itself can upset the loader.
fn tamper_body(path: &Path, tamper: impl Fn(&str) -> String) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let _stale_hash = lines.next().unwrap();
    let body: String = lines.map(|l| format!("{l}\n")).collect();
    let body = tamper(&body);
    let digest = Sha256::digest(body.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    fs::write(path, format!("{header}\nhash {hex}\n{body}")).unwrap();
}

#[test]
fn tables_round_trip_through_disk() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();
    for (fn_kind, order) in [(LimitFn::Phase, 3), (LimitFn::Transport, 2)] {
        let built = CoinLimitTable::build(fn_kind, order).unwrap();
        let path = dir.path().join(LimitTables::cache_file_name(fn_kind, order));
        built.save(&path).unwrap();
        let loaded = CoinLimitTable::load(&path).unwrap();
        assert_eq!(loaded, built, "{fn_kind:?} table changed across a disk round trip");
    }
}

#[test]
fn warm_cache_runs_do_not_rebuild() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();

    let cold_start = build_calls();
    let first = LimitTables::load_or_build(Some(dir.path()), 3, 2).unwrap();
    assert_eq!(build_calls(), cold_start + 2, "cold run should build each table once");
    for (fn_kind, order) in [(LimitFn::Phase, 3), (LimitFn::Transport, 2)] {
        let path = dir.path().join(LimitTables::cache_file_name(fn_kind, order));
        assert!(path.is_file(), "cold run should persist {}", path.display());
    }

    let warm_start = build_calls();
    let second = LimitTables::load_or_build(Some(dir.path()), 3, 2).unwrap();
    assert_eq!(build_calls(), warm_start, "warm run must not build anything");
    assert_eq!(second.phase, first.phase);
    assert_eq!(second.transport, first.transport);
}

#[test]
fn no_cache_dir_builds_in_memory() {
    let _g = gate();
    let before = build_calls();
    let tables = LimitTables::load_or_build(None, 1, 1).unwrap();
    assert_eq!(build_calls(), before + 2);
    assert_eq!(tables.phase.max_order(), 1);
    assert_eq!(tables.transport.max_order(), 1);
}

#[test]
fn future_format_version_is_refused() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(LimitTables::cache_file_name(LimitFn::Transport, 1));
    CoinLimitTable::build(LimitFn::Transport, 1).unwrap().save(&path).unwrap();

    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen("colim-table v1", "colim-table v2", 1)).unwrap();

    let err = CoinLimitTable::load(&path).unwrap_err();
    assert!(
        matches!(&err, ColimError::Incompatible { expected, found, .. }
            if expected == "colim-table v1" && found == "colim-table v2"),
        "got {err}"
    );
}

#[test]
fn corrupted_content_fails_the_hash_check() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(LimitTables::cache_file_name(LimitFn::Phase, 2));
    CoinLimitTable::build(LimitFn::Phase, 2).unwrap().save(&path).unwrap();

    // Flip body bytes without restamping the hash.
    let text = fs::read_to_string(&path).unwrap();
    fs::write(&path, text.replacen("max-order", "MAX-ORDER", 1)).unwrap();

    let err = CoinLimitTable::load(&path).unwrap_err();
    assert!(matches!(err, ColimError::HashMismatch { .. }), "got {err}");
}

#[test]
fn malformed_body_reports_its_line() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(LimitTables::cache_file_name(LimitFn::Phase, 2));
    CoinLimitTable::build(LimitFn::Phase, 2).unwrap().save(&path).unwrap();

    // A correctly hashed file whose max-order line is garbage: the loader
    // must get past the hash check and point at line 4 (1-based, whole file).
    tamper_body(&path, |body| body.replacen("max-order", "max-disorder", 1));

    let err = CoinLimitTable::load(&path).unwrap_err();
    assert!(
        matches!(err, ColimError::Malformed { line: 4, .. }),
        "got {err}"
    );
}

#[test]
fn truncated_record_list_reports_the_missing_order() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(LimitTables::cache_file_name(LimitFn::Transport, 2));
    CoinLimitTable::build(LimitFn::Transport, 2).unwrap().save(&path).unwrap();

    tamper_body(&path, |body| {
        let keep: String =
            body.lines().filter(|l| !l.starts_with("order 2 ")).map(|l| format!("{l}\n")).collect();
        keep
    });

    let err = CoinLimitTable::load(&path).unwrap_err();
    assert!(
        matches!(&err, ColimError::Malformed { msg, .. } if msg.contains("order 2")),
        "got {err}"
    );
}

#[test]
fn invalid_cache_file_is_an_error_not_a_rebuild() {
    let _g = gate();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(LimitTables::cache_file_name(LimitFn::Phase, 1));
    fs::write(&path, "not a table\n").unwrap();

    let before = build_calls();
    let err = LimitTables::load_or_build(Some(dir.path()), 1, 1).unwrap_err();
    assert!(matches!(err, ColimError::Incompatible { .. }), "got {err}");
    assert_eq!(build_calls(), before, "an unusable cache file must never trigger a quiet rebuild");
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let err = CoinLimitTable::load(&dir.path().join("absent.colim")).unwrap_err();
    assert!(matches!(err, ColimError::Io(_)), "got {err}");
}
