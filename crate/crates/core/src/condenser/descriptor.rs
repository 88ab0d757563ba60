//! Text descriptors: `backend n r D` on the first line, then backend
//! parameters. Floats use the shortest round-trip formatting.

use std::fmt::Write as _;
use std::str::FromStr;

use super::guv::{GuvCondenser, GuvParams};
use super::lhl::LhlFamily;
use super::random::CertifiedFamily;
use super::{Backend, LinearCondenser};
use crate::error::{Error, Result};
use crate::field::Poly;
use crate::gf2::F2Matrix;

pub fn write_descriptor(cond: &LinearCondenser) -> String {
    let mut out = format!(
        "{} {} {} {}\n",
        cond.backend_name(),
        cond.n,
        cond.r,
        cond.seeds
    );
    match &cond.backend {
        Backend::Guv(g) => {
            let p = g.params();
            let _ = writeln!(
                out,
                "{} {} {} {} {} {} {}",
                p.alpha, p.kappa, p.eps, p.u, p.ell, p.q, p.d
            );
            let coeffs: Vec<String> = p.g.coeffs().iter().map(|c| format!("{c:x}")).collect();
            let _ = writeln!(out, "{}", coeffs.join(" "));
        }
        Backend::Lhl(l) => {
            let _ = writeln!(out, "{} {}", l.kappa(), l.eps());
        }
        Backend::Certified(c) => {
            let _ = writeln!(out, "{} {} {}", c.k, c.eps, c.seed);
            for m in &c.matrices {
                let rows: Vec<String> = m.row_words().iter().map(|w| format!("{w:x}")).collect();
                let _ = writeln!(out, "{}", rows.join(" "));
            }
        }
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim();
            if !line.is_empty() {
                return Ok((i + 1, line.split_whitespace().collect()));
            }
        }
        Err(Error::Parse {
            line: self.last + 1,
            message: "unexpected end of descriptor".into(),
        })
    }
}

fn field<T: FromStr>(fields: &[&str], i: usize, line: usize) -> Result<T> {
    let raw = fields.get(i).ok_or_else(|| Error::Parse {
        line,
        message: format!("missing field {}", i + 1),
    })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {raw:?}"),
    })
}

fn hex(raw: &str, line: usize) -> Result<u64> {
    u64::from_str_radix(raw, 16).map_err(|_| Error::Parse {
        line,
        message: format!("bad hex word {raw:?}"),
    })
}

fn expect_len(fields: &[&str], len: usize, line: usize) -> Result<()> {
    if fields.len() != len {
        return Err(Error::Parse {
            line,
            message: format!("expected {len} fields, found {}", fields.len()),
        });
    }
    Ok(())
}

pub fn read_descriptor(text: &str) -> Result<LinearCondenser> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (hl, head) = lines.next_fields()?;
    expect_len(&head, 4, hl)?;
    let n: usize = field(&head, 1, hl)?;
    let r: usize = field(&head, 2, hl)?;
    let seeds: u64 = field(&head, 3, hl)?;
    let cond = match head[0] {
        "guv" => {
            let (l, f) = lines.next_fields()?;
            expect_len(&f, 7, l)?;
            let (gl, gf) = lines.next_fields()?;
            let d: u32 = field(&f, 6, l)?;
            let coeffs = gf.iter().map(|c| hex(c, gl)).collect::<Result<Vec<_>>>()?;
            let params = GuvParams {
                alpha: field(&f, 0, l)?,
                n,
                kappa: field(&f, 1, l)?,
                eps: field(&f, 2, l)?,
                u: field(&f, 3, l)?,
                ell: field(&f, 4, l)?,
                q: field(&f, 5, l)?,
                d,
                r_bits: r,
                g: Poly::new(d, coeffs).map_err(|e| Error::Parse {
                    line: gl,
                    message: e.to_string(),
                })?,
            };
            if params.ell * d as usize != r || params.q != seeds {
                return Err(Error::Parse {
                    line: l,
                    message: "GUV parameters disagree with the header".into(),
                });
            }
            LinearCondenser {
                n,
                r,
                seeds,
                backend: Backend::Guv(GuvCondenser::new(params)?),
            }
        }
        "lhl" => {
            let (l, f) = lines.next_fields()?;
            expect_len(&f, 2, l)?;
            let family = LhlFamily::new(n, r, field(&f, 0, l)?, field(&f, 1, l)?)?;
            if family.seeds() != seeds {
                return Err(Error::Parse {
                    line: hl,
                    message: format!("seed count must be 2^{n}"),
                });
            }
            LinearCondenser {
                n,
                r,
                seeds,
                backend: Backend::Lhl(family),
            }
        }
        "certified" => {
            let (l, f) = lines.next_fields()?;
            expect_len(&f, 3, l)?;
            let mut matrices = Vec::with_capacity(seeds as usize);
            for _ in 0..seeds {
                let (ml, mf) = lines.next_fields()?;
                expect_len(&mf, r, ml)?;
                let rows = mf.iter().map(|w| hex(w, ml)).collect::<Result<Vec<_>>>()?;
                matrices.push(F2Matrix::new(n, rows).map_err(|e| Error::Parse {
                    line: ml,
                    message: e.to_string(),
                })?);
            }
            LinearCondenser {
                n,
                r,
                seeds,
                backend: Backend::Certified(CertifiedFamily {
                    k: field(&f, 0, l)?,
                    eps: field(&f, 1, l)?,
                    seed: field(&f, 2, l)?,
                    matrices,
                }),
            }
        }
        other => {
            return Err(Error::Parse {
                line: hl,
                message: format!("unknown backend {other:?}"),
            })
        }
    };
    Ok(cond)
}
