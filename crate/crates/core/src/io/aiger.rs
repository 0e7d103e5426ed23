use super::ParseError;
use crate::xmg::{Edge, XmgBuilder, XmgNetlist};

/// Parse combinational ASCII AIGER. Each AND becomes `MAJ(a, b, 0)` with no
/// folding or hashing, so the operation count equals the AND count once
/// dangling gates are dropped. AND definitions may come in any order.
pub fn parse_aiger(text: &str) -> Result<XmgNetlist, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hl, header) = lines.next().ok_or_else(|| ParseError::new(0, "empty input"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "aag" {
        return Err(ParseError::new(hl, "expected header 'aag M I L O A'"));
    }
    let nums: Vec<usize> = fields[1..]
        .iter()
        .map(|f| f.parse::<usize>().map_err(|_| ParseError::new(hl, format!("bad header field '{f}'"))))
        .collect::<Result<_, _>>()?;
    let (max_var, ni, nl, no, na) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
    if nl > 0 {
        return Err(ParseError::new(hl, "latches are not supported"));
    }
    if ni + na > max_var {
        return Err(ParseError::new(hl, "M is smaller than I + A"));
    }
    let mut next_line = |what: &str| lines.next().ok_or_else(|| ParseError::new(0, format!("unexpected end of input, expected {what}")));
    let lit = |line: usize, s: &str| -> Result<usize, ParseError> {
        let v: usize = s.parse().map_err(|_| ParseError::new(line, format!("bad literal '{s}'")))?;
        if v / 2 > max_var {
            return Err(ParseError::new(line, format!("literal {v} out of range")));
        }
        Ok(v)
    };

    // Variable -> definition.
    #[derive(Clone, Copy)]
    enum Def {
        Undefined,
        Input(usize),
        And(usize, usize, usize),
    }
    let mut defs = vec![Def::Undefined; max_var + 1];
    for k in 0..ni {
        let (ln, l) = next_line("an input")?;
        let v = lit(ln, l.trim())?;
        if v % 2 == 1 || v < 2 {
            return Err(ParseError::new(ln, "input must be a positive even literal"));
        }
        if !matches!(defs[v / 2], Def::Undefined) {
            return Err(ParseError::new(ln, format!("variable {} defined twice", v / 2)));
        }
        defs[v / 2] = Def::Input(k);
    }
    let mut outputs = Vec::with_capacity(no);
    for _ in 0..no {
        let (ln, l) = next_line("an output")?;
        outputs.push((ln, lit(ln, l.trim())?));
    }
    for _ in 0..na {
        let (ln, l) = next_line("an AND")?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(ParseError::new(ln, "AND line needs three literals"));
        }
        let (lhs, a, b) = (lit(ln, parts[0])?, lit(ln, parts[1])?, lit(ln, parts[2])?);
        if lhs % 2 == 1 || lhs < 2 {
            return Err(ParseError::new(ln, "AND output must be a positive even literal"));
        }
        if !matches!(defs[lhs / 2], Def::Undefined) {
            return Err(ParseError::new(ln, format!("variable {} defined twice", lhs / 2)));
        }
        defs[lhs / 2] = Def::And(a, b, ln);
    }

    let mut b = XmgBuilder::raw("aiger", ni);
    let mut edge_of: Vec<Option<Edge>> = vec![None; max_var + 1];
    edge_of[0] = Some(Edge::ZERO);
    let mut on_path = vec![false; max_var + 1];
    // Iterative DFS so deep AIGs do not overflow the stack.
    let mut resolve = |root: usize, line: usize, b: &mut XmgBuilder| -> Result<Edge, ParseError> {
        let mut stack = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if edge_of[v].is_some() {
                continue;
            }
            match defs[v] {
                Def::Undefined => return Err(ParseError::new(line, format!("variable {v} is never defined"))),
                Def::Input(k) => edge_of[v] = Some(b.pi(k)),
                Def::And(x, y, ln) => {
                    if expanded {
                        let e = |l: usize| edge_of[l / 2].unwrap().complement_if(l % 2 == 1);
                        edge_of[v] = Some(b.maj(e(x), e(y), Edge::ZERO));
                        on_path[v] = false;
                    } else {
                        if on_path[v] {
                            return Err(ParseError::new(ln, format!("combinational cycle through variable {v}")));
                        }
                        on_path[v] = true;
                        stack.push((v, true));
                        for l in [y, x] {
                            if edge_of[l / 2].is_none() {
                                if on_path[l / 2] {
                                    return Err(ParseError::new(ln, format!("combinational cycle through variable {}", l / 2)));
                                }
                                stack.push((l / 2, false));
                            }
                        }
                    }
                }
            }
        }
        Ok(edge_of[root].unwrap())
    };
    // Resolve ANDs by variable index so the result keeps the source order
    // wherever that order is already topological.
    for v in 0..=max_var {
        if let Def::And(_, _, ln) = defs[v] {
            resolve(v, ln, &mut b)?;
        }
    }
    for (ln, l) in outputs {
        let e = resolve(l / 2, ln, &mut b)?.complement_if(l % 2 == 1);
        b.add_po(e);
    }
    Ok(b.build())
}
