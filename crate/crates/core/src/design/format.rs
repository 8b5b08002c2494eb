//! The `DDESIGN 1` and `DMASK 1` text formats.

use super::{DropoutDesign, SuperBlock};
use crate::error::{Error, Result};
use std::fmt::Write;

const DESIGN_MAGIC: &str = "DDESIGN 1";
const MASK_MAGIC: &str = "DMASK 1";

fn write_header(out: &mut String, magic: &str, design: &DropoutDesign) {
    let sizes: Vec<String> = design.sizes().iter().map(usize::to_string).collect();
    writeln!(out, "{magic}").unwrap();
    writeln!(out, "layers {}", design.layers()).unwrap();
    writeln!(out, "sizes {}", sizes.join(" ")).unwrap();
    writeln!(out, "blocks {}", design.num_blocks()).unwrap();
}

pub fn write_ddesign(design: &DropoutDesign) -> String {
    let mut out = String::new();
    write_header(&mut out, DESIGN_MAGIC, design);
    for b in design.blocks() {
        let parts: Vec<String> = b
            .subs()
            .iter()
            .map(|s| s.iter().map(u32::to_string).collect::<Vec<_>>().join(" "))
            .collect();
        writeln!(out, "{}", parts.join(" | ")).unwrap();
    }
    out
}

pub fn write_dmask(design: &DropoutDesign) -> String {
    let mut out = String::new();
    write_header(&mut out, MASK_MAGIC, design);
    for b in design.blocks() {
        let parts: Vec<String> = b
            .subs()
            .iter()
            .zip(design.sizes())
            .map(|(s, &v)| {
                let mut bits = vec![b'0'; v];
                for &p in s {
                    bits[p as usize] = b'1';
                }
                String::from_utf8(bits).unwrap()
            })
            .collect();
        writeln!(out, "{}", parts.join("|")).unwrap();
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    seen: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, l)) => {
                self.seen = i + 1;
                Ok((i + 1, l.trim_end_matches('\r')))
            }
            None => Err(Error::parse(self.seen + 1, format!("unexpected end of input, expected {what}"))),
        }
    }

    fn finish(&mut self) -> Result<()> {
        for (i, l) in self.inner.by_ref() {
            if !l.trim().is_empty() {
                return Err(Error::parse(i + 1, "unexpected content after the last block"));
            }
        }
        Ok(())
    }
}

fn keyword_number(line: usize, text: &str, key: &str) -> Result<usize> {
    let mut parts = text.split_whitespace();
    if parts.next() != Some(key) {
        return Err(Error::parse(line, format!("expected `{key} <count>`")));
    }
    let n = parts
        .next()
        .ok_or_else(|| Error::parse(line, format!("missing count after `{key}`")))?;
    if parts.next().is_some() {
        return Err(Error::parse(line, "trailing tokens"));
    }
    n.parse().map_err(|_| Error::parse(line, format!("bad count {n:?}")))
}

/// Returns the line iterator positioned at the first block, plus sizes and block count.
fn read_header<'a>(text: &'a str, magic: &str) -> Result<(Lines<'a>, Vec<usize>, usize)> {
    let mut lines = Lines { inner: text.lines().enumerate(), seen: 0 };
    let (ln, first) = lines.next(magic)?;
    if first.trim() != magic {
        return Err(Error::parse(ln, format!("expected `{magic}`")));
    }
    let (ln, l) = lines.next("layers")?;
    let n = keyword_number(ln, l, "layers")?;
    let (ln, l) = lines.next("sizes")?;
    let mut parts = l.split_whitespace();
    if parts.next() != Some("sizes") {
        return Err(Error::parse(ln, "expected `sizes v1 ... vn`"));
    }
    let sizes = parts
        .map(|x| x.parse::<usize>().map_err(|_| Error::parse(ln, format!("bad layer size {x:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if sizes.len() != n {
        return Err(Error::parse(ln, format!("{} sizes given for {n} layers", sizes.len())));
    }
    let (ln, l) = lines.next("blocks")?;
    let b = keyword_number(ln, l, "blocks")?;
    Ok((lines, sizes, b))
}

fn check_design(line: usize, sizes: Vec<usize>, blocks: Vec<SuperBlock>) -> Result<DropoutDesign> {
    DropoutDesign::new(sizes, blocks).map_err(|e| Error::parse(line, e.to_string()))
}

pub fn read_ddesign(text: &str) -> Result<DropoutDesign> {
    let (mut lines, sizes, b) = read_header(text, DESIGN_MAGIC)?;
    let mut blocks = Vec::with_capacity(b);
    for _ in 0..b {
        let (ln, l) = lines.next("a block line")?;
        let subs = l
            .split('|')
            .map(|part| {
                let pts = part
                    .split_whitespace()
                    .map(|x| x.parse::<u32>().map_err(|_| Error::parse(ln, format!("bad point {x:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                if pts.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::parse(ln, "points must be strictly ascending"));
                }
                Ok(pts)
            })
            .collect::<Result<Vec<_>>>()?;
        if subs.len() != sizes.len() {
            return Err(Error::parse(ln, format!("{} sub-blocks, expected {}", subs.len(), sizes.len())));
        }
        let block = SuperBlock::new(subs);
        check_design(ln, sizes.clone(), vec![block.clone()])?;
        blocks.push(block);
    }
    lines.finish()?;
    check_design(4, sizes, blocks)
}

pub fn read_dmask(text: &str) -> Result<DropoutDesign> {
    let (mut lines, sizes, b) = read_header(text, MASK_MAGIC)?;
    let mut blocks = Vec::with_capacity(b);
    for _ in 0..b {
        let (ln, l) = lines.next("a mask line")?;
        let parts: Vec<&str> = l.trim().split('|').collect();
        if parts.len() != sizes.len() {
            return Err(Error::parse(ln, format!("{} masks, expected {}", parts.len(), sizes.len())));
        }
        let mut subs = Vec::with_capacity(parts.len());
        for (i, (bits, &v)) in parts.iter().zip(&sizes).enumerate() {
            if bits.len() != v {
                return Err(Error::parse(ln, format!("mask {} has length {}, expected {v}", i + 1, bits.len())));
            }
            let mut sub = Vec::new();
            for (j, c) in bits.chars().enumerate() {
                match c {
                    '1' => sub.push(j as u32),
                    '0' => {}
                    _ => return Err(Error::parse(ln, format!("bad mask character {c:?}"))),
                }
            }
            subs.push(sub);
        }
        let block = SuperBlock::new(subs);
        check_design(ln, sizes.clone(), vec![block.clone()])?;
        blocks.push(block);
    }
    lines.finish()?;
    check_design(4, sizes, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DropoutDesign {
        DropoutDesign::from_lists(vec![3, 2], vec![vec![vec![0, 2], vec![1]], vec![vec![1], vec![0, 1]]]).unwrap()
    }

    #[test]
    fn design_round_trip() {
        let text = write_ddesign(&sample());
        assert_eq!(text, "DDESIGN 1\nlayers 2\nsizes 3 2\nblocks 2\n0 2 | 1\n1 | 0 1\n");
        assert_eq!(read_ddesign(&text).unwrap(), sample());
    }

    #[test]
    fn mask_round_trip() {
        let text = write_dmask(&sample());
        assert_eq!(text, "DMASK 1\nlayers 2\nsizes 3 2\nblocks 2\n101|01\n010|11\n");
        assert_eq!(read_dmask(&text).unwrap(), sample());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "DDESIGN 1\nlayers 2\nsizes 3 2\nblocks 2\n0 2 | 1\n2 1 | 0\n";
        assert!(matches!(read_ddesign(bad), Err(Error::Parse { line: 6, .. })));
        let bad = "DDESIGN 1\nlayers 2\nsizes 3\nblocks 0\n";
        assert!(matches!(read_ddesign(bad), Err(Error::Parse { line: 3, .. })));
        let bad = "DDESIGN 1\nlayers 2\nsizes 3 2\nblocks 1\n0 | 5\n";
        assert!(matches!(read_ddesign(bad), Err(Error::Parse { line: 5, .. })));
        let bad = "DMASK 1\nlayers 1\nsizes 3\nblocks 1\n000\n";
        assert!(matches!(read_dmask(bad), Err(Error::Parse { line: 5, .. })));
        assert!(matches!(read_ddesign("DDESIGN 2\n"), Err(Error::Parse { line: 1, .. })));
    }
}
