//! Serialization helpers that emit big integers as JSON numbers when they fit
//! in 64 bits and as decimal strings otherwise.

use num_bigint::BigInt;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub(crate) fn one<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(v) {
        Ok(x) => s.serialize_i64(x),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

pub(crate) fn seq<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    struct Item<'a>(&'a BigInt);
    impl serde::Serialize for Item<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            one(self.0, s)
        }
    }
    let mut out = s.serialize_seq(Some(v.len()))?;
    for x in v {
        out.serialize_element(&Item(x))?;
    }
    out.end()
}
