//! Berkeley PLA reader and writer.
//!
//! Emitted files are bit-exact: ASCII, LF line endings, a single space
//! between the input and output parts, `.i`/`.o`/`.type fd`/`.p` header,
//! `.e` terminator. In the output part `1` puts the row in the ON-set of
//! that output, `0` carries no meaning, and `-` marks a don't-care.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::truthtab::{RowValue, TruthTable, TruthSource};

use super::{Cover, Cube, InputSym, Provenance};

/// One output position of a PLA row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaOutSym {
    /// `1`: the row asserts this output.
    On,
    /// `0`: the row says nothing about this output.
    NoMeaning,
    /// `-`: this output is a don't-care on the row.
    DontCare,
}

/// A parsed PLA line: input symbols and output symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaRow {
    pub input: Vec<InputSym>,
    pub output: Vec<PlaOutSym>,
}

/// A parsed PLA file. Unknown dot-directives are preserved in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaFile {
    pub num_inputs: u32,
    pub num_outputs: u32,
    pub declared_products: Option<usize>,
    pub pla_type: Option<String>,
    pub rows: Vec<PlaRow>,
    /// Directives other than `.i`/`.o`/`.p`/`.type`/`.e`, as (name, rest).
    pub extras: Vec<(String, String)>,
}

impl PlaFile {
    /// Interpret the rows as an ON-set cover: each row with at least one `1`
    /// output becomes a cube participating in exactly those outputs; rows
    /// with no `1` (pure don't-care or empty rows) contribute nothing.
    pub fn to_cover(&self, provenance: Provenance) -> Result<Cover> {
        let mut cubes = Vec::new();
        for row in &self.rows {
            let participates: Vec<bool> =
                row.output.iter().map(|&s| s == PlaOutSym::On).collect();
            if participates.iter().any(|&p| p) {
                cubes.push(Cube::from_symbols(&row.input, &participates)?);
            }
        }
        Cover::new(self.num_inputs, self.num_outputs, cubes, provenance)
    }
}

/// Write a truth table: one line per row in ascending `(a, b)` order, with
/// don't-care rows emitting `-` in every output position.
pub fn pla_write_table(tt: &TruthTable, w: &mut impl Write) -> Result<()> {
    let n = tt.num_inputs();
    let m = tt.num_outputs();
    let rows = tt.num_rows();
    write_header(w, n, m, rows as usize)?;
    let mut line = String::with_capacity(n as usize + m as usize + 2);
    for index in 0..rows {
        line.clear();
        for col in 0..n {
            let bit = n - 1 - col;
            line.push(if index >> bit & 1 == 1 { '1' } else { '0' });
        }
        line.push(' ');
        match tt.row(index) {
            RowValue::DontCare => {
                for _ in 0..m {
                    line.push('-');
                }
            }
            RowValue::Specified(out) => {
                for col in 0..m {
                    let bit = m - 1 - col;
                    line.push(if out >> bit & 1 == 1 { '1' } else { '0' });
                }
            }
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.write_all(b".e\n")?;
    Ok(())
}

/// Write a cover: one line per cube in the cover's canonical order.
pub fn pla_write_cover(cover: &Cover, w: &mut impl Write) -> Result<()> {
    write_header(w, cover.num_inputs(), cover.num_outputs(), cover.cube_count())?;
    for cube in cover.cubes() {
        let mut line = String::new();
        for col in 0..cover.num_inputs() {
            line.push(cube.input_sym(col).to_char());
        }
        line.push(' ');
        for col in 0..cover.num_outputs() {
            let o = cover.num_outputs() - 1 - col;
            line.push(if cube.output_participates(o) { '1' } else { '0' });
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.write_all(b".e\n")?;
    Ok(())
}

fn write_header(w: &mut impl Write, n: u32, m: u32, products: usize) -> Result<()> {
    write!(w, ".i {n}\n.o {m}\n.type fd\n.p {products}\n")?;
    Ok(())
}

/// Parse a PLA file with `.type fd` (or no type directive). The `.p` count,
/// when present, is cross-checked against the number of parsed rows.
pub fn pla_read(r: impl BufRead) -> Result<PlaFile> {
    let mut num_inputs: Option<u32> = None;
    let mut num_outputs: Option<u32> = None;
    let mut declared_products: Option<usize> = None;
    let mut pla_type: Option<String> = None;
    let mut extras = Vec::new();
    let mut rows: Vec<PlaRow> = Vec::new();
    let mut terminated = false;

    for (lineno, line) in r.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = match line.find('#') {
            Some(pos) => &line[..pos],
            None => &line[..],
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if terminated {
            return Err(Error::PlaParse { line: lineno, msg: "content after .e".into() });
        }
        if let Some(rest) = line.strip_prefix('.') {
            let mut parts = rest.splitn(2, char::is_whitespace);
            let name = parts.next().unwrap_or("");
            let arg = parts.next().unwrap_or("").trim();
            match name {
                "i" => {
                    num_inputs = Some(parse_count(arg, lineno, ".i")? as u32);
                }
                "o" => {
                    num_outputs = Some(parse_count(arg, lineno, ".o")? as u32);
                }
                "p" => {
                    declared_products = Some(parse_count(arg, lineno, ".p")?);
                }
                "type" => {
                    if arg != "fd" {
                        return Err(Error::PlaParse {
                            line: lineno,
                            msg: format!("unsupported .type {arg} (only fd)"),
                        });
                    }
                    pla_type = Some(arg.to_string());
                }
                "e" | "end" => {
                    terminated = true;
                }
                _ => extras.push((name.to_string(), arg.to_string())),
            }
            continue;
        }

        let n = num_inputs.ok_or(Error::PlaParse {
            line: lineno,
            msg: "cube line before .i".into(),
        })? as usize;
        let m = num_outputs.ok_or(Error::PlaParse {
            line: lineno,
            msg: "cube line before .o".into(),
        })? as usize;
        let mut tokens = line.split_whitespace();
        let input_tok = tokens.next().unwrap_or("");
        let output_tok: String = tokens.collect();
        if input_tok.len() != n {
            return Err(Error::PlaParse {
                line: lineno,
                msg: format!("input part has {} symbols, expected {n}", input_tok.len()),
            });
        }
        if output_tok.len() != m {
            return Err(Error::PlaParse {
                line: lineno,
                msg: format!("output part has {} symbols, expected {m}", output_tok.len()),
            });
        }
        let input = input_tok
            .chars()
            .map(|c| match c {
                '0' => Ok(InputSym::Zero),
                '1' => Ok(InputSym::One),
                '-' | '2' => Ok(InputSym::Dash),
                _ => Err(Error::PlaParse {
                    line: lineno,
                    msg: format!("bad input symbol `{c}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        let output = output_tok
            .chars()
            .map(|c| match c {
                '1' | '4' => Ok(PlaOutSym::On),
                '0' | '~' => Ok(PlaOutSym::NoMeaning),
                '-' | '2' => Ok(PlaOutSym::DontCare),
                _ => Err(Error::PlaParse {
                    line: lineno,
                    msg: format!("bad output symbol `{c}`"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(PlaRow { input, output });
    }

    let num_inputs = num_inputs.ok_or(Error::PlaParse { line: 0, msg: "missing .i".into() })?;
    let num_outputs = num_outputs.ok_or(Error::PlaParse { line: 0, msg: "missing .o".into() })?;
    if let Some(declared) = declared_products {
        if declared != rows.len() {
            return Err(Error::PlaParse {
                line: 0,
                msg: format!(".p declares {declared} products but {} rows present", rows.len()),
            });
        }
    }
    Ok(PlaFile { num_inputs, num_outputs, declared_products, pla_type, rows, extras })
}

fn parse_count(arg: &str, lineno: usize, what: &str) -> Result<usize> {
    arg.parse().map_err(|_| Error::PlaParse {
        line: lineno,
        msg: format!("bad {what} argument `{arg}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{canonical_cover, verify_cover};
    use super::*;
    use crate::sparsity::{reachable_set, NaturalRange, ValueSet};
    use crate::truthtab::{gen_block_tt, BlockOp, BlockSpec, RowValue};
    use std::io::Cursor;

    fn tt_to_string(tt: &TruthTable) -> String {
        let mut buf = Vec::new();
        pla_write_table(tt, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    fn cover_to_string(cover: &Cover) -> String {
        let mut buf = Vec::new();
        pla_write_cover(cover, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn identity_function_table_text() {
        // 1-input, 1-output identity block: a 1x1 "adder" truncated to 1 bit.
        let spec = BlockSpec::new(
            BlockOp::Add,
            1,
            1,
            crate::sparsity::Interp::Unsigned,
            crate::sparsity::Interp::Unsigned,
            crate::truthtab::OutputPolicy::TruncateKeepHigh(1),
        )
        .unwrap();
        let single = ValueSet::from_values(1, [0u32]).unwrap();
        let tt = gen_block_tt(spec, ValueSet::full(1), single).unwrap();
        // Rows: (a=0,b=0) -> 0, (a=1,b=0) -> 1; b=1 rows are DC.
        let text = tt_to_string(&tt);
        assert_eq!(text, ".i 2\n.o 1\n.type fd\n.p 4\n00 0\n01 -\n10 1\n11 -\n.e\n");
    }

    #[test]
    fn cover_roundtrip() {
        let table = super::super::tests::table_from_str(3, 2, &[
            "00", "01", "11", "10", "d", "01", "00", "11",
        ]);
        let cover = canonical_cover(&table).unwrap();
        let text = cover_to_string(&cover);
        let parsed = pla_read(Cursor::new(text.as_bytes())).unwrap();
        assert_eq!(parsed.pla_type.as_deref(), Some("fd"));
        let back = parsed.to_cover(Provenance::Imported).unwrap();
        assert_eq!(back.cubes(), cover.cubes());
        // Writing again is byte-identical.
        assert_eq!(cover_to_string(&back), text);
    }

    #[test]
    fn table_dc_rows_match_enumeration() {
        let spec = BlockSpec::unsigned(BlockOp::Mul, 2, 3).unwrap();
        let ds2 = |wl: u32| {
            reachable_set(
                wl,
                crate::sparsity::Interp::Unsigned,
                NaturalRange::full(wl, crate::sparsity::Interp::Unsigned),
                &"ds:2".parse().unwrap(),
            )
            .unwrap()
        };
        let tt = gen_block_tt(spec, ds2(2), ds2(3)).unwrap();
        let text = tt_to_string(&tt);
        for (i, line) in text.lines().skip(4).take(32).enumerate() {
            let dc_line = line.ends_with("-----");
            let dc_row = matches!(tt.row(i as u64), RowValue::DontCare);
            assert_eq!(dc_line, dc_row, "row {i}: {line}");
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = ".i 2\n.o 1\n0 1\n";
        match pla_read(Cursor::new(bad.as_bytes())) {
            Err(Error::PlaParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }

        let bad_type = ".i 1\n.o 1\n.type fr\n0 1\n.e\n";
        assert!(matches!(
            pla_read(Cursor::new(bad_type.as_bytes())),
            Err(Error::PlaParse { line: 3, .. })
        ));

        let bad_count = ".i 1\n.o 1\n.p 3\n0 1\n.e\n";
        assert!(matches!(
            pla_read(Cursor::new(bad_count.as_bytes())),
            Err(Error::PlaParse { .. })
        ));
    }

    #[test]
    fn unknown_directives_are_preserved() {
        let text = ".i 1\n.o 1\n.ilb x0\n.ob f\n.p 1\n1 1\n.e\n";
        let parsed = pla_read(Cursor::new(text.as_bytes())).unwrap();
        assert_eq!(
            parsed.extras,
            vec![("ilb".to_string(), "x0".to_string()), ("ob".to_string(), "f".to_string())]
        );
    }

    #[test]
    fn comments_and_blank_lines_are_ignored(){
        let text = "# header comment\n.i 1\n.o 1\n\n.p 1\n1 1 # trailing\n.e\n";
        let parsed = pla_read(Cursor::new(text.as_bytes())).unwrap();
        assert_eq!(parsed.rows.len(), 1);
    }

    #[test]
    fn imported_minimized_cover_verifies_against_table() {
        // A hand-minimized espresso-style file for the 2x2 unsigned
        // multiplier (inputs a1 a0 b1 b0, outputs p3 p2 p1 p0).
        let text = "\
.i 4
.o 4
.type fd
.p 8
1111 1000
101- 0100
1-10 0100
011- 0010
1-01 0010
10-1 0010
-110 0010
-1-1 0001
.e
";
        let parsed = pla_read(Cursor::new(text.as_bytes())).unwrap();
        let cover = parsed.to_cover(Provenance::Imported).unwrap();
        let spec = BlockSpec::unsigned(BlockOp::Mul, 2, 2).unwrap();
        let tt = gen_block_tt(spec, ValueSet::full(2), ValueSet::full(2)).unwrap();
        let report = verify_cover(&cover, &tt).unwrap();
        assert!(report.ok, "{report:?}");
    }
}
