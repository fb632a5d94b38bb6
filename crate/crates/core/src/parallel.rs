//! Index-ordered parallel map over scoped threads.

/// `(0..len).map(f)` split into contiguous chunks over `threads` workers.
/// Output order is the index order regardless of `threads`.
pub(crate) fn map_indexed<T, F>(len: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = threads.max(1).min(len.max(1));
    if threads == 1 {
        return (0..len).map(f).collect();
    }
    let chunk = len.div_ceil(threads);
    let mut slots: Vec<Option<T>> = (0..len).map(|_| None).collect();
    let f = &f;
    std::thread::scope(|scope| {
        for (t, part) in slots.chunks_mut(chunk).enumerate() {
            scope.spawn(move || {
                for (k, slot) in part.iter_mut().enumerate() {
                    *slot = Some(f(t * chunk + k));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every slot filled")).collect()
}
