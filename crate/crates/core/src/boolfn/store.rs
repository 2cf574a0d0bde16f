use std::collections::HashMap;
use std::sync::Mutex;

use super::func::BoolFunc;

/// Handle of an interned function. Only meaningful relative to the store
/// that issued it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FuncId(pub u32);

#[derive(Default)]
struct Inner {
    ids: HashMap<BoolFunc, FuncId>,
    funcs: Vec<BoolFunc>,
}

/// Hash-consing table for [`BoolFunc`]s. Safe to share between threads.
#[derive(Default)]
pub struct FunctionStore {
    inner: Mutex<Inner>,
}

impl FunctionStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&self, f: &BoolFunc) -> FuncId {
        let mut inner = self.inner.lock().unwrap();
        if let Some(&id) = inner.ids.get(f) {
            return id;
        }
        let id = FuncId(inner.funcs.len() as u32);
        inner.funcs.push(f.clone());
        inner.ids.insert(f.clone(), id);
        id
    }

    pub fn lookup(&self, f: &BoolFunc) -> Option<FuncId> {
        self.inner.lock().unwrap().ids.get(f).copied()
    }

    pub fn get(&self, id: FuncId) -> Option<BoolFunc> {
        self.inner.lock().unwrap().funcs.get(id.0 as usize).cloned()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{VarId, VarSet};
    use std::sync::Arc;

    #[test]
    fn interning_is_idempotent() {
        let store = FunctionStore::new();
        let a = BoolFunc::var(VarId(0))
            .and(&BoolFunc::var(VarId(1)))
            .unwrap();
        let b = BoolFunc::var(VarId(1))
            .and(&BoolFunc::var(VarId(0)))
            .unwrap();
        assert_eq!(store.intern(&a), store.intern(&b));
        assert_eq!(store.len(), 1);
        let c = BoolFunc::constant(VarSet::range(2), false).unwrap();
        assert_ne!(store.intern(&a), store.intern(&c));
        assert_eq!(store.get(store.intern(&c)).unwrap(), c);
    }

    #[test]
    fn concurrent_interning_agrees() {
        let store = Arc::new(FunctionStore::new());
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let store = Arc::clone(&store);
                std::thread::spawn(move || {
                    (0..16u64)
                        .map(|t| {
                            let f =
                                BoolFunc::from_index_fn(VarSet::range(2), |i| (t >> i) & 1 == 1)
                                    .unwrap();
                            store.intern(&f)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        let results: Vec<Vec<FuncId>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(results.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(store.len(), 16);
    }
}
