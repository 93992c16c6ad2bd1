//! Run-time entities: values, pool addresses, object and pool cells, the
//! heap, and stack frames.
//!
//! Objects and pools live in separate, densely numbered address spaces
//! assigned in allocation order, so replaying a run reproduces every
//! address. A pool stores each cluster as one flat vector of values with a
//! fixed record width, so the members' values for a cluster sit side by
//! side in memory.

use std::collections::HashMap;
use std::fmt;

use crate::ast::{Ident, PoolArg};
use crate::lookup::ProgramIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PoolId(pub usize);

/// A pool address: the global `none` pool or a pool on the heap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PoolAddr {
    None,
    Pool(PoolId),
}

/// `null`, an unpooled object, or a member `(pool, index)` of a pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Null,
    Obj(ObjId),
    Loc(PoolId, usize),
}

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "obj@{}", self.0)
    }
}

impl fmt::Display for PoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pool@{}", self.0)
    }
}

impl fmt::Display for PoolAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoolAddr::None => f.write_str("none"),
            PoolAddr::Pool(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Obj(o) => write!(f, "{o}"),
            Value::Loc(p, n) => write!(f, "({p}, {n})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObjectCell {
    pub class: Ident,
    pub ghost: Vec<PoolAddr>,
    pub record: Vec<Value>,
}

/// The records of one cluster, stored contiguously `width` values apiece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub width: usize,
    pub slots: Vec<Value>,
}

impl Cluster {
    pub fn new(width: usize) -> Self {
        Cluster { width, slots: Vec::new() }
    }

    /// Number of records in this cluster.
    pub fn len(&self) -> usize {
        self.slots.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn record(&self, n: usize) -> &[Value] {
        &self.slots[n * self.width..(n + 1) * self.width]
    }

    fn push_null(&mut self) {
        self.slots.resize(self.slots.len() + self.width, Value::Null);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolCell {
    pub layout: Ident,
    pub ghost: Vec<PoolAddr>,
    pub clusters: Vec<Cluster>,
}

impl PoolCell {
    /// Member count, taken from the first cluster.
    pub fn size(&self) -> usize {
        self.clusters.first().map_or(0, Cluster::len)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HeapError {
    #[error("no object at {0}")]
    NoObject(ObjId),
    #[error("no pool at {0}")]
    NoPool(PoolId),
    #[error("{0} is reserved but not yet constructed")]
    Reserved(PoolId),
    #[error("{0} is already constructed")]
    AlreadyConstructed(PoolId),
    #[error("field index {index} out of range for {obj}")]
    FieldIndex { obj: ObjId, index: usize },
    #[error("slot ({cluster}, {member}, {offset}) out of range for {pool}")]
    SlotIndex { pool: PoolId, member: usize, cluster: usize, offset: usize },
}

/// Object cells and pool cells. Addresses are never reused or freed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Heap {
    objects: Vec<ObjectCell>,
    pools: Vec<Option<PoolCell>>,
}

impl Heap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn pool_count(&self) -> usize {
        self.pools.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = (ObjId, &ObjectCell)> {
        self.objects.iter().enumerate().map(|(i, c)| (ObjId(i), c))
    }

    /// Constructed pools in address order.
    pub fn pools(&self) -> impl Iterator<Item = (PoolId, &PoolCell)> {
        self.pools.iter().enumerate().filter_map(|(i, c)| c.as_ref().map(|c| (PoolId(i), c)))
    }

    pub fn object(&self, id: ObjId) -> Result<&ObjectCell, HeapError> {
        self.objects.get(id.0).ok_or(HeapError::NoObject(id))
    }

    pub fn object_mut(&mut self, id: ObjId) -> Result<&mut ObjectCell, HeapError> {
        self.objects.get_mut(id.0).ok_or(HeapError::NoObject(id))
    }

    pub fn pool(&self, id: PoolId) -> Result<&PoolCell, HeapError> {
        match self.pools.get(id.0) {
            None => Err(HeapError::NoPool(id)),
            Some(None) => Err(HeapError::Reserved(id)),
            Some(Some(c)) => Ok(c),
        }
    }

    pub fn pool_mut(&mut self, id: PoolId) -> Result<&mut PoolCell, HeapError> {
        match self.pools.get_mut(id.0) {
            None => Err(HeapError::NoPool(id)),
            Some(None) => Err(HeapError::Reserved(id)),
            Some(Some(c)) => Ok(c),
        }
    }

    /// Allocates an unpooled object with every field `null`.
    pub fn alloc_object(&mut self, class: Ident, ghost: Vec<PoolAddr>, field_count: usize) -> ObjId {
        debug_assert_eq!(ghost.first(), Some(&PoolAddr::None));
        let id = ObjId(self.objects.len());
        self.objects.push(ObjectCell { class, ghost, record: vec![Value::Null; field_count] });
        id
    }

    /// Claims a fresh pool address; the pool is constructed later by
    /// [`Heap::alloc_pool`], which lets pools refer to each other.
    pub fn reserve_pool(&mut self) -> PoolId {
        let id = PoolId(self.pools.len());
        self.pools.push(None);
        id
    }

    /// Constructs a reserved pool with one empty cluster per width.
    pub fn alloc_pool(
        &mut self,
        id: PoolId,
        layout: Ident,
        ghost: Vec<PoolAddr>,
        widths: &[usize],
    ) -> Result<(), HeapError> {
        debug_assert_eq!(ghost.first(), Some(&PoolAddr::Pool(id)));
        match self.pools.get_mut(id.0) {
            None => Err(HeapError::NoPool(id)),
            Some(Some(_)) => Err(HeapError::AlreadyConstructed(id)),
            Some(slot) => {
                let clusters = widths.iter().map(|&w| Cluster::new(w)).collect();
                *slot = Some(PoolCell { layout, ghost, clusters });
                Ok(())
            }
        }
    }

    /// Appends an all-`null` record to every cluster; returns the new
    /// member's index.
    pub fn pool_append(&mut self, id: PoolId) -> Result<usize, HeapError> {
        let pool = self.pool_mut(id)?;
        let n = pool.size();
        for c in &mut pool.clusters {
            c.push_null();
        }
        Ok(n)
    }

    fn slot_index(&self, id: PoolId, n: usize, i: usize, j: usize) -> Result<usize, HeapError> {
        let pool = self.pool(id)?;
        let err = HeapError::SlotIndex { pool: id, member: n, cluster: i, offset: j };
        let c = pool.clusters.get(i).ok_or(err.clone())?;
        if j >= c.width || n >= c.len() {
            return Err(err);
        }
        Ok(n * c.width + j)
    }

    /// The `j`th value of member `n`'s record in cluster `i`.
    pub fn read_slot(&self, id: PoolId, n: usize, i: usize, j: usize) -> Result<Value, HeapError> {
        let k = self.slot_index(id, n, i, j)?;
        Ok(self.pool(id)?.clusters[i].slots[k])
    }

    pub fn write_slot(&mut self, id: PoolId, n: usize, i: usize, j: usize, v: Value) -> Result<(), HeapError> {
        let k = self.slot_index(id, n, i, j)?;
        self.pool_mut(id)?.clusters[i].slots[k] = v;
        Ok(())
    }

    pub fn read_field(&self, id: ObjId, i: usize) -> Result<Value, HeapError> {
        self.object(id)?.record.get(i).copied().ok_or(HeapError::FieldIndex { obj: id, index: i })
    }

    pub fn write_field(&mut self, id: ObjId, i: usize, v: Value) -> Result<(), HeapError> {
        let slot = self.object_mut(id)?.record.get_mut(i).ok_or(HeapError::FieldIndex { obj: id, index: i })?;
        *slot = v;
        Ok(())
    }

    /// One line per cell: objects first, then pools, each in address order.
    pub fn dump(&self, idx: &ProgramIndex) -> String {
        let mut out = String::new();
        for (id, cell) in self.objects() {
            out.push_str(&format!("{id} : {}<{}> {{", cell.class, join(&cell.ghost)));
            let names = idx.fields_of(&cell.class).unwrap_or(&[]);
            let fields: Vec<String> =
                cell.record.iter().enumerate().map(|(k, v)| match names.get(k) {
                    Some(n) => format!("{n} = {v}"),
                    None => format!("#{k} = {v}"),
                }).collect();
            if fields.is_empty() {
                out.push_str(" }\n");
            } else {
                out.push_str(&format!(" {} }}\n", fields.join(", ")));
            }
        }
        for (k, slot) in self.pools.iter().enumerate() {
            let id = PoolId(k);
            let Some(cell) = slot else {
                out.push_str(&format!("{id} : <reserved>\n"));
                continue;
            };
            let clusters = match idx.layout_of(&cell.layout) {
                Ok((_, cs)) => cs
                    .iter()
                    .map(|c| format!("[{}]", join(c)))
                    .collect::<Vec<_>>()
                    .join(","),
                Err(_) => cell.clusters.iter().map(|c| format!("<{}>", c.width)).collect::<Vec<_>>().join(","),
            };
            out.push_str(&format!(
                "{id} : {}<{}> size={} clusters=[{clusters}]",
                cell.layout,
                join(&cell.ghost),
                cell.size()
            ));
            for n in 0..cell.size() {
                out.push_str(&format!(" | record {n}: "));
                for c in &cell.clusters {
                    if n < c.len() {
                        out.push_str(&format!("({})", join(c.record(n))));
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

/// What a frame binds a name to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Val(Value),
    Pool(PoolAddr),
}

/// A stack frame. The literal `none` is not stored; it always resolves to
/// the `none` pool.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frame {
    slots: HashMap<Ident, Slot>,
}

impl Frame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: Ident, slot: Slot) {
        self.slots.insert(name, slot);
    }

    pub fn get(&self, name: &str) -> Option<Slot> {
        self.slots.get(name).copied()
    }

    pub fn value(&self, name: &str) -> Option<Value> {
        match self.get(name)? {
            Slot::Val(v) => Some(v),
            Slot::Pool(_) => None,
        }
    }

    /// Resolves a pool argument; `none` needs no binding.
    pub fn pool(&self, arg: &PoolArg) -> Option<PoolAddr> {
        match arg {
            PoolArg::None => Some(PoolAddr::None),
            PoolArg::Var(v) => match self.get(v)? {
                Slot::Pool(p) => Some(p),
                Slot::Val(_) => None,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &Ident> {
        self.slots.keys()
    }
}
