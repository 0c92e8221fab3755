//! Flat binary field dump.
//!
//! Layout, all little-endian:
//! `"SKFD"`, u32 version, u32 block count, then per block
//! u8 shape, u8 state, u32 order, u64 elements, u32 components,
//! u64 points per element, u32 interleave width, followed by
//! components·elements·points f64 in `[comp][elem][point]` order.

use std::io::{Read, Write};

use super::{Field, FieldState};
use crate::error::{Error, Result};
use crate::shapes::ShapeType;

const MAGIC: &[u8; 4] = b"SKFD";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct DumpBlock {
    pub shape: ShapeType,
    pub state: FieldState,
    pub order: usize,
    pub n_elements: usize,
    pub n_components: usize,
    pub points_per_element: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

fn shape_code(s: ShapeType) -> u8 {
    ShapeType::ALL.iter().position(|&x| x == s).unwrap() as u8
}

pub fn write_field_dump<W: Write>(field: &mut Field, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(field.blocks.len() as u32).to_le_bytes())?;
    for b in &mut field.blocks {
        w.write_all(&[shape_code(b.shape()), (b.state == FieldState::Phys) as u8])?;
        w.write_all(&(b.order() as u32).to_le_bytes())?;
        w.write_all(&(b.n_elements as u64).to_le_bytes())?;
        w.write_all(&(b.n_components as u32).to_le_bytes())?;
        w.write_all(&(b.points_per_element() as u64).to_le_bytes())?;
        w.write_all(&(b.width as u32).to_le_bytes())?;
        for v in b.canonical()? {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)?;
    Ok(b)
}

pub fn read_field_dump<R: Read>(mut r: R) -> Result<Vec<DumpBlock>> {
    if &take::<4, _>(&mut r)? != MAGIC {
        return Err(Error::Io("bad magic".into()));
    }
    let version = u32::from_le_bytes(take(&mut r)?);
    if version != VERSION {
        return Err(Error::Io(format!("unsupported dump version {version}")));
    }
    let n = u32::from_le_bytes(take(&mut r)?) as usize;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let [sc, st] = take::<2, _>(&mut r)?;
        let shape = *ShapeType::ALL
            .get(sc as usize)
            .ok_or_else(|| Error::Io(format!("bad shape code {sc}")))?;
        let state = if st == 1 { FieldState::Phys } else { FieldState::Coeff };
        let order = u32::from_le_bytes(take(&mut r)?) as usize;
        let n_elements = u64::from_le_bytes(take(&mut r)?) as usize;
        let n_components = u32::from_le_bytes(take(&mut r)?) as usize;
        let points_per_element = u64::from_le_bytes(take(&mut r)?) as usize;
        let width = u32::from_le_bytes(take(&mut r)?) as usize;
        let count = n_elements * n_components * points_per_element;
        let mut values = Vec::with_capacity(count);
        for _ in 0..count {
            values.push(f64::from_le_bytes(take(&mut r)?));
        }
        out.push(DumpBlock { shape, state, order, n_elements, n_components, points_per_element, width, values });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_block::{make_field, BlockSpec};
    use crate::geometry::GeometryClass;

    #[test]
    fn round_trip() {
        let mut f = make_field(
            &[
                BlockSpec::new(ShapeType::Tri, 2, GeometryClass::Regular, 3).width(2),
                BlockSpec::new(ShapeType::Pyr, 1, GeometryClass::Deformed, 2).width(4),
            ],
            FieldState::Coeff,
        )
        .unwrap();
        let v: Vec<f64> = (0..18).map(|i| i as f64 * 0.5).collect();
        f.blocks[0].set_canonical(&v).unwrap();
        let mut buf = Vec::new();
        write_field_dump(&mut f, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"SKFD");
        let blocks = read_field_dump(&buf[..]).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].values, v);
        assert_eq!(blocks[0].shape, ShapeType::Tri);
        assert_eq!(blocks[1].points_per_element, 5);
        assert_eq!(blocks[1].values, vec![0.0; 10]);
        assert!(read_field_dump(&b"NOPE"[..]).is_err());
    }
}
