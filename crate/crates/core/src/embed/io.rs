//! Binary model persistence.
//!
//! Layout: magic "ENTV1\0"; little-endian u32 dim, entity count E, vocab
//! size V; entity table (kind byte, u32 key length, UTF-8 key); vocab table
//! (u32 length, UTF-8 word, u64 count); E x dim then V x dim f32 matrices,
//! row-major little-endian; u32 length plus UTF-8 JSON config block.

use std::path::Path;

use super::{EmbedError, EmbeddingModel, EntityId, EntityKind, TrainConfig, Vocab};
use crate::matrix::Matrix;

const MAGIC: &[u8; 6] = b"ENTV1\0";

pub fn save_model(m: &EmbeddingModel, path: &Path) -> Result<(), EmbedError> {
    std::fs::write(path, to_bytes(m)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<EmbeddingModel, EmbedError> {
    from_bytes(&std::fs::read(path)?)
}

pub fn to_bytes(m: &EmbeddingModel) -> Result<Vec<u8>, EmbedError> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(m.dim as u32).to_le_bytes());
    out.extend_from_slice(&(m.entities.len() as u32).to_le_bytes());
    out.extend_from_slice(&(m.vocab.len() as u32).to_le_bytes());
    for e in &m.entities {
        out.push(e.kind.as_byte());
        out.extend_from_slice(&(e.key.len() as u32).to_le_bytes());
        out.extend_from_slice(e.key.as_bytes());
    }
    for i in 0..m.vocab.len() {
        let w = m.vocab.word(i);
        out.extend_from_slice(&(w.len() as u32).to_le_bytes());
        out.extend_from_slice(w.as_bytes());
        out.extend_from_slice(&m.vocab.count(i).to_le_bytes());
    }
    for v in m.entity_vectors.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in m.word_vectors.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let config = serde_json::to_vec(&m.config)?;
    out.extend_from_slice(&(config.len() as u32).to_le_bytes());
    out.extend_from_slice(&config);
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], EmbedError> {
        let end = self.pos.checked_add(n).ok_or(EmbedError::Truncated {
            expected: u64::MAX,
            actual: self.buf.len() as u64,
        })?;
        if end > self.buf.len() {
            return Err(EmbedError::Truncated {
                expected: end as u64,
                actual: self.buf.len() as u64,
            });
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, EmbedError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, EmbedError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, EmbedError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String, EmbedError> {
        let len = self.u32()? as usize;
        Ok(String::from_utf8(self.take(len)?.to_vec())?)
    }

    fn f32_matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix, EmbedError> {
        let raw = self.take(rows * cols * 4)?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Matrix::from_vec(rows, cols, data))
    }
}

pub fn from_bytes(buf: &[u8]) -> Result<EmbeddingModel, EmbedError> {
    let mut c = Cursor { buf, pos: 0 };
    if c.take(MAGIC.len()).map(|m| m != MAGIC).unwrap_or(true) {
        return Err(EmbedError::BadMagic);
    }
    let dim = c.u32()?;
    let e_count = c.u32()? as usize;
    let v_count = c.u32()? as usize;

    let mut entities = Vec::with_capacity(e_count);
    for _ in 0..e_count {
        let kind = EntityKind::from_byte(c.u8()?)?;
        entities.push(EntityId {
            kind,
            key: c.string()?,
        });
    }
    let mut words = Vec::with_capacity(v_count);
    let mut counts = Vec::with_capacity(v_count);
    for _ in 0..v_count {
        words.push(c.string()?);
        counts.push(c.u64()?);
    }
    let entity_vectors = c.f32_matrix(e_count, dim as usize)?;
    let word_vectors = c.f32_matrix(v_count, dim as usize)?;
    let config: TrainConfig = serde_json::from_slice(c.string()?.as_bytes())?;
    if c.pos != buf.len() {
        return Err(EmbedError::TrailingBytes(buf.len() - c.pos));
    }
    if config.dim as u32 != dim {
        return Err(EmbedError::DimMismatch {
            header: dim,
            config: config.dim as u32,
        });
    }
    let min_count = config.min_count;
    let model = EmbeddingModel {
        dim: dim as usize,
        entities,
        vocab: Vocab::from_ordered(words, counts, min_count),
        entity_vectors,
        word_vectors,
        config,
    };
    if !model.is_finite() {
        return Err(EmbedError::NonFinite);
    }
    Ok(model)
}
