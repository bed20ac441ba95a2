//! Small shared helpers.

use crate::error::Result;

/// Maps `f` over `0..n` using up to `threads` worker threads and returns the
/// results in index order. Each index is computed exactly once by exactly one
/// worker, so for a pure `f` the output is identical for any thread count.
pub fn parallel_map_indexed<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = threads.max(1).min(n.max(1));
    if workers <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::with_capacity(workers);
        for w in 0..workers {
            let f = &f;
            handles.push(scope.spawn(move || {
                (w..n).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>()
            }));
        }
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                slots[i] = Some(v);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("all slots filled")).collect()
}

/// Formats a float with 17 significant digits, enough for an exact f64
/// round trip through text.
pub fn format_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        // Integral values print plainly so counts stay readable.
        format!("{:.1}", v)
    } else {
        format!("{:.16e}", v)
    }
}

/// JSON formatter that renders every f64 with 17 significant digits so text
/// round trips are bit-exact.
struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(format_f64(value).as_bytes())
    }
}

/// Serializes to a JSON string under the 17-significant-digit float policy,
/// with a trailing newline.
pub fn to_json_string<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits utf-8"))
}
