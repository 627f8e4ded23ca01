//! graph6 text encoding.
//!
//! A token is the size prefix (one byte `n + 63` for `n <= 62`, otherwise `~`
//! followed by three 6-bit bytes) followed by the upper triangle of the
//! adjacency matrix, read column by column (`(0,1), (0,2), (1,2), (0,3), ...`),
//! packed big-endian into 6-bit groups, each offset by 63 and zero-padded.

use std::io::{BufRead, Write};

use super::graph::{Graph, MAX_NODES};
use crate::error::{Error, Result};

/// Largest node count with a one-byte size prefix.
pub const SHORT_FORM_MAX_NODES: usize = 62;

const OFFSET: u8 = 63;

pub fn encode(g: &Graph) -> String {
    let n = g.node_count();
    let nbits = n * (n - 1) / 2;
    let mut out = Vec::with_capacity(4 + nbits.div_ceil(6));
    if n <= SHORT_FORM_MAX_NODES {
        out.push(n as u8 + OFFSET);
    } else {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push((n >> shift & 0x3f) as u8 + OFFSET);
        }
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = acc << 1 | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + OFFSET);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + OFFSET);
    }
    String::from_utf8(out).expect("graph6 bytes are ASCII")
}

pub fn decode(token: &str) -> Result<Graph> {
    let bytes = token.as_bytes();
    let Some(&size) = bytes.first() else {
        return Err(Error::parse(0, "empty token"));
    };
    let (n, header) = if size == 126 {
        if bytes.len() < 4 {
            return Err(Error::parse(bytes.len(), "truncated long-form size prefix"));
        }
        let mut n = 0usize;
        for (offset, &b) in bytes.iter().enumerate().take(4).skip(1) {
            if !(OFFSET..=OFFSET + 63).contains(&b) {
                return Err(Error::parse(offset, format!("byte {b} outside 63..=126")));
            }
            n = n << 6 | (b - OFFSET) as usize;
        }
        (n, 4)
    } else if (OFFSET..126).contains(&size) {
        ((size - OFFSET) as usize, 1)
    } else {
        return Err(Error::parse(
            0,
            format!("size byte {size} outside 63..=126"),
        ));
    };
    if n == 0 {
        return Err(Error::parse(0, "graphs with zero nodes are not supported"));
    }
    if n > MAX_NODES {
        return Err(Error::parse(
            0,
            format!("{n} nodes exceeds the {MAX_NODES}-node limit"),
        ));
    }
    let nbits = n * (n - 1) / 2;
    let expected = header + nbits.div_ceil(6);
    if bytes.len() != expected {
        return Err(Error::parse(
            bytes.len().min(expected),
            format!(
                "expected {expected} bytes for {n} nodes, got {}",
                bytes.len()
            ),
        ));
    }
    for (offset, &b) in bytes.iter().enumerate().skip(header) {
        if !(OFFSET..=OFFSET + 63).contains(&b) {
            return Err(Error::parse(offset, format!("byte {b} outside 63..=126")));
        }
    }
    let mut g = Graph::empty(n)?;
    let mut pos = 0;
    for j in 1..n {
        for i in 0..j {
            let b = bytes[header + pos / 6] - OFFSET;
            if b >> (5 - pos % 6) & 1 == 1 {
                g.add_edge(i, j)?;
            }
            pos += 1;
        }
    }
    if pos % 6 != 0 {
        let last = bytes.len() - 1;
        let pad = (bytes[last] - OFFSET) & ((1 << (6 - pos % 6)) - 1);
        if pad != 0 {
            return Err(Error::parse(last, "nonzero padding bits"));
        }
    }
    Ok(g)
}

/// Reads one graph per line; blank lines are skipped. Errors carry the 1-based line number.
pub fn read_graphs<R: BufRead>(reader: R) -> Result<Vec<Graph>> {
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let token = line.trim_end_matches('\r');
        if token.is_empty() {
            continue;
        }
        let g = decode(token).map_err(|e| match e {
            Error::Parse { offset, reason } => Error::Parse {
                offset,
                reason: format!("line {}: {reason}", idx + 1),
            },
            other => other,
        })?;
        out.push(g);
    }
    Ok(out)
}

/// Writes one graph6 token per line, LF-terminated, no header.
pub fn write_graphs<'a, W: Write>(
    mut writer: W,
    graphs: impl IntoIterator<Item = &'a Graph>,
) -> Result<()> {
    for g in graphs {
        writer.write_all(encode(g).as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_tokens() {
        // Reference tokens from the published format description.
        assert_eq!(encode(&Graph::complete(5).unwrap()), "D~{");
        assert_eq!(encode(&Graph::cycle(5).unwrap()), "Dhc");
        assert_eq!(encode(&Graph::empty(1).unwrap()), "@");
        let petersen = Graph::from_edges(
            10,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                (0, 5),
                (1, 6),
                (2, 7),
                (3, 8),
                (4, 9),
                (5, 7),
                (7, 9),
                (9, 6),
                (6, 8),
                (8, 5),
            ],
        )
        .unwrap();
        assert_eq!(encode(&petersen), "IheA@GUAo");
    }

    #[test]
    fn size_byte_for_ten_nodes() {
        let token = encode(&Graph::circulant(10, &[1, 2]).unwrap());
        assert_eq!(token.as_bytes()[0], 10 + 63);
        assert_eq!(token.len(), 1 + 45usize.div_ceil(6));
    }

    #[test]
    fn decode_errors_carry_offsets() {
        assert!(matches!(decode(""), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(decode("D~"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(
            decode("D~{{"),
            Err(Error::Parse { offset: 3, .. })
        ));
        assert!(matches!(decode("D~ "), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(decode(" ~{"), Err(Error::Parse { offset: 0, .. })));
        assert!(matches!(decode("~"), Err(Error::Parse { offset: 1, .. })));
        // K5 bits end in 4 padding zeros; "D~|" sets one of them.
        assert!(matches!(decode("D~|"), Err(Error::Parse { offset: 2, .. })));
    }

    #[test]
    fn read_reports_line_numbers() {
        let text = "D~{\n\nDhc\nbad\n";
        let err = read_graphs(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let ok = read_graphs("D~{\r\nDhc\n".as_bytes()).unwrap();
        assert_eq!(ok.len(), 2);
    }

    #[test]
    fn long_form_above_62_nodes() {
        let g = Graph::cycle(64).unwrap();
        let token = encode(&g);
        assert_eq!(&token.as_bytes()[..4], &[126, 63, 64, 63]);
        assert_eq!(decode(&token).unwrap(), g);
        assert!(matches!(decode("~?A"), Err(Error::Parse { offset: 3, .. })));
    }
}
