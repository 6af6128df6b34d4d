//! Grade-1 (uncontracted) Braille transcription into Unicode Braille
//! patterns, plus the physical cell geometry used by layout and emission.
//!
//! The character table is data (`grade1.tsv`, or a user-supplied file in the
//! same format). Indicator cells are fixed:
//!
//! * numeric indicator (dots 3-4-5-6) opens a number; `.` `,` and a fraction
//!   line (dots 3-4) between digits keep the number open,
//! * capital indicator (dot 6) precedes an upper-case letter,
//! * letter indicator (dots 5-6) precedes a lower-case letter that directly
//!   follows a number, so `a`..`j` are not read as digits.

use std::collections::{BTreeMap, HashMap};
use std::sync::LazyLock;

use thiserror::Error;

pub const CELL_WIDTH_MM: f64 = 6.0;
pub const CELL_HEIGHT_MM: f64 = 10.0;
pub const CELL_ADVANCE_MM: f64 = 6.0;
pub const DOT_DIAMETER_MM: f64 = 1.5;
/// Distance between dot centres within a cell.
pub const DOT_PITCH_MM: f64 = 2.5;

pub const BLANK: char = '\u{2800}';
pub const NUMERIC_INDICATOR: char = '\u{283C}';
pub const CAPITAL_INDICATOR: char = '\u{2820}';
pub const LETTER_INDICATOR: char = '\u{2830}';
pub const FRACTION_LINE: char = '\u{280C}';
/// Terminates a truncated run.
pub const ELLIPSIS_CELL: char = '\u{2820}';

const DEFAULT_TABLE: &str = include_str!("grade1.tsv");

static DEFAULT: LazyLock<BrailleTable> =
    LazyLock::new(|| BrailleTable::from_tsv(DEFAULT_TABLE).expect("bundled Braille table is valid"));

/// Physical Braille dimensions in millimetres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrailleMetrics;

impl BrailleMetrics {
    pub const CELL_WIDTH_MM: f64 = CELL_WIDTH_MM;
    pub const CELL_HEIGHT_MM: f64 = CELL_HEIGHT_MM;
    pub const INTER_CELL_ADVANCE_MM: f64 = CELL_ADVANCE_MM;

    pub fn run_width(cells: usize) -> f64 {
        cells as f64 * CELL_ADVANCE_MM
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrailleRun {
    pub cells: Vec<char>,
    pub source_text: String,
}

impl BrailleRun {
    pub fn as_string(&self) -> String {
        self.cells.iter().collect()
    }

    pub fn width_mm(&self) -> f64 {
        BrailleMetrics::run_width(self.cells.len())
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrailleError {
    #[error("unsupported character {0:?} at position {1}")]
    UnsupportedCharacter(char, usize),
    #[error("malformed Braille at cell {position}: {reason}")]
    Malformed { position: usize, reason: &'static str },
    #[error("translation table line {line}: {reason}")]
    Table { line: usize, reason: String },
}

/// Converts dot numbers (`"1245"`) to a Unicode Braille pattern.
pub fn dots_to_cell(dots: &str) -> Option<char> {
    let mut bits = 0u32;
    for d in dots.chars() {
        let n = d.to_digit(10)?;
        if !(1..=6).contains(&n) {
            return None;
        }
        bits |= 1 << (n - 1);
    }
    char::from_u32(0x2800 + bits)
}

/// Raised dots of a six-dot cell, as numbers 1..=6.
pub fn cell_dots(cell: char) -> impl Iterator<Item = u32> {
    let bits = (cell as u32).wrapping_sub(0x2800);
    (1..=6).filter(move |d| bits & (1 << (d - 1)) != 0)
}

/// Centre of dot `n` relative to the cell's top-left corner.
pub fn dot_offset(n: u32) -> (f64, f64) {
    let col = if n <= 3 { 0.0 } else { 1.0 };
    let row = ((n - 1) % 3) as f64;
    let x = (CELL_WIDTH_MM - DOT_PITCH_MM) / 2.0 + col * DOT_PITCH_MM;
    let y = (CELL_HEIGHT_MM - 2.0 * DOT_PITCH_MM) / 2.0 + row * DOT_PITCH_MM;
    (x, y)
}

pub fn is_six_dot(cell: char) -> bool {
    ('\u{2800}'..='\u{283F}').contains(&cell)
}

#[derive(Debug, Clone)]
pub struct BrailleTable {
    symbols: BTreeMap<char, Vec<char>>,
    digits: BTreeMap<char, char>,
    digit_of_cell: HashMap<char, char>,
    /// Non-digit entries, longest sequence first.
    decode: Vec<(Vec<char>, char)>,
}

impl BrailleTable {
    /// The bundled Grade-1 English table.
    pub fn grade1() -> &'static BrailleTable {
        &DEFAULT
    }

    /// Parses a `char<TAB>dots` table. Lines starting with `#` are comments.
    pub fn from_tsv(text: &str) -> Result<Self, BrailleError> {
        let mut entries = BTreeMap::new();
        parse_into(text, &mut entries)?;
        Self::from_entries(entries)
    }

    /// Layers a user table over the bundled one; user lines win.
    pub fn with_overrides(text: &str) -> Result<Self, BrailleError> {
        let mut entries = DEFAULT.entries();
        parse_into(text, &mut entries)?;
        Self::from_entries(entries)
    }

    fn entries(&self) -> BTreeMap<char, Vec<char>> {
        let mut all = self.symbols.clone();
        for (d, c) in &self.digits {
            all.insert(*d, vec![*c]);
        }
        all
    }

    fn from_entries(entries: BTreeMap<char, Vec<char>>) -> Result<Self, BrailleError> {
        let table_err = |reason: String| BrailleError::Table { line: 0, reason };
        let mut symbols = BTreeMap::new();
        let mut digits = BTreeMap::new();
        let mut digit_of_cell = HashMap::new();
        for (ch, cells) in entries {
            if ch.is_ascii_uppercase() || ch == ' ' {
                return Err(table_err(format!("{ch:?} is derived, not a table entry")));
            }
            if ch.is_ascii_digit() {
                let [cell] = cells[..] else {
                    return Err(table_err(format!("digit {ch} must map to a single cell")));
                };
                if digit_of_cell.insert(cell, ch).is_some() {
                    return Err(table_err(format!("digit {ch} shares a cell with another digit")));
                }
                digits.insert(ch, cell);
            } else {
                symbols.insert(ch, cells);
            }
        }
        for d in '0'..='9' {
            if !digits.contains_key(&d) {
                return Err(table_err(format!("missing digit {d}")));
            }
        }
        let reserved = [BLANK, NUMERIC_INDICATOR, CAPITAL_INDICATOR, LETTER_INDICATOR];
        let mut decode: Vec<(Vec<char>, char)> = Vec::new();
        for (ch, cells) in &symbols {
            if reserved.contains(&cells[0]) {
                return Err(table_err(format!("{ch:?} starts with a reserved indicator cell")));
            }
            if (*ch == '.' || *ch == ',')
                && (digit_of_cell.contains_key(&cells[0]) || cells[0] == FRACTION_LINE)
            {
                return Err(table_err(format!("{ch:?} would be read as part of a number")));
            }
            for (other_cells, other) in &decode {
                if other_cells.starts_with(cells) || cells.starts_with(other_cells) {
                    return Err(table_err(format!("{ch:?} and {other:?} have ambiguous cells")));
                }
            }
            decode.push((cells.clone(), *ch));
        }
        decode.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
        Ok(Self {
            symbols,
            digits,
            digit_of_cell,
            decode,
        })
    }

    pub fn supports(&self, c: char) -> bool {
        c == ' '
            || self.digits.contains_key(&c)
            || self.symbols.contains_key(&c)
            || (c.is_ascii_uppercase() && self.symbols.contains_key(&c.to_ascii_lowercase()))
    }

    pub fn transcribe(&self, text: &str) -> Result<BrailleRun, BrailleError> {
        let chars: Vec<char> = text.chars().collect();
        let mut cells = Vec::with_capacity(chars.len() + 4);
        let mut numeric = false;
        for (i, &c) in chars.iter().enumerate() {
            if c == ' ' {
                cells.push(BLANK);
                numeric = false;
                continue;
            }
            if let Some(&cell) = self.digits.get(&c) {
                if !numeric {
                    cells.push(NUMERIC_INDICATOR);
                    numeric = true;
                }
                cells.push(cell);
                continue;
            }
            let next_is_digit = chars.get(i + 1).is_some_and(|n| self.digits.contains_key(n));
            if numeric && c == '/' && next_is_digit {
                cells.push(FRACTION_LINE);
                continue;
            }
            if c.is_ascii_uppercase() {
                let Some(seq) = self.symbols.get(&c.to_ascii_lowercase()) else {
                    return Err(BrailleError::UnsupportedCharacter(c, i));
                };
                cells.push(CAPITAL_INDICATOR);
                cells.extend_from_slice(seq);
                numeric = false;
                continue;
            }
            let Some(seq) = self.symbols.get(&c) else {
                return Err(BrailleError::UnsupportedCharacter(c, i));
            };
            if numeric && (c == '.' || c == ',') {
                cells.extend_from_slice(seq);
                continue;
            }
            if numeric && c.is_ascii_lowercase() && self.continues_number(&seq[0]) {
                cells.push(LETTER_INDICATOR);
            }
            cells.extend_from_slice(seq);
            numeric = false;
        }
        Ok(BrailleRun {
            cells,
            source_text: text.to_string(),
        })
    }

    fn continues_number(&self, cell: &char) -> bool {
        self.digit_of_cell.contains_key(cell)
            || *cell == FRACTION_LINE
            || ['.', ','].iter().any(|p| self.symbols.get(p).is_some_and(|s| s[0] == *cell))
    }

    fn match_symbol(&self, cells: &[char]) -> Option<(char, usize)> {
        self.decode
            .iter()
            .find(|(seq, _)| cells.starts_with(seq))
            .map(|(seq, ch)| (*ch, seq.len()))
    }

    pub fn back_transcribe(&self, run: &BrailleRun) -> Result<String, BrailleError> {
        let cells = &run.cells;
        let mut out = String::with_capacity(cells.len());
        let mut numeric = false;
        let mut i = 0;
        let malformed = |position, reason| BrailleError::Malformed { position, reason };
        while i < cells.len() {
            let cell = cells[i];
            if !is_six_dot(cell) {
                return Err(malformed(i, "cell outside the six-dot range"));
            }
            if numeric {
                if let Some(&d) = self.digit_of_cell.get(&cell) {
                    out.push(d);
                    i += 1;
                    continue;
                }
                let next_is_digit = cells
                    .get(i + 1)
                    .is_some_and(|n| self.digit_of_cell.contains_key(n));
                if cell == FRACTION_LINE && next_is_digit {
                    out.push('/');
                    i += 1;
                    continue;
                }
                if let Some((ch @ ('.' | ','), len)) = self.match_symbol(&cells[i..]) {
                    out.push(ch);
                    i += len;
                    continue;
                }
                numeric = false;
                if cell == LETTER_INDICATOR {
                    match self.match_symbol(&cells[i + 1..]) {
                        Some((ch, len)) if ch.is_ascii_lowercase() => {
                            out.push(ch);
                            i += 1 + len;
                            continue;
                        }
                        _ => return Err(malformed(i, "letter indicator not followed by a letter")),
                    }
                }
            }
            match cell {
                BLANK => {
                    out.push(' ');
                    i += 1;
                }
                NUMERIC_INDICATOR => {
                    if !cells.get(i + 1).is_some_and(|n| self.digit_of_cell.contains_key(n)) {
                        return Err(malformed(i, "numeric indicator not followed by a digit"));
                    }
                    numeric = true;
                    i += 1;
                }
                CAPITAL_INDICATOR => match self.match_symbol(&cells[i + 1..]) {
                    Some((ch, len)) if ch.is_ascii_lowercase() => {
                        out.push(ch.to_ascii_uppercase());
                        i += 1 + len;
                    }
                    _ => return Err(malformed(i, "capital indicator not followed by a letter")),
                },
                LETTER_INDICATOR => return Err(malformed(i, "letter indicator outside a number")),
                _ => match self.match_symbol(&cells[i..]) {
                    Some((ch, len)) => {
                        out.push(ch);
                        i += len;
                    }
                    None => return Err(malformed(i, "unknown cell sequence")),
                },
            }
        }
        Ok(out)
    }
}

fn parse_into(text: &str, entries: &mut BTreeMap<char, Vec<char>>) -> Result<(), BrailleError> {
    for (n, line) in text.lines().enumerate() {
        let line_no = n + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| BrailleError::Table {
            line: line_no,
            reason: reason.to_string(),
        };
        let (key, dots) = line.split_once('\t').ok_or_else(|| err("expected char<TAB>dots"))?;
        let mut key_chars = key.chars();
        let (Some(ch), None) = (key_chars.next(), key_chars.next()) else {
            return Err(err("key must be exactly one character"));
        };
        let cells = dots
            .split_whitespace()
            .map(|d| dots_to_cell(d).ok_or_else(|| err("dot numbers must be 1-6")))
            .collect::<Result<Vec<_>, _>>()?;
        if cells.is_empty() || cells.contains(&BLANK) {
            return Err(err("empty dot pattern"));
        }
        entries.insert(ch, cells);
    }
    Ok(())
}

/// Transcribes with the bundled Grade-1 table.
pub fn transcribe(text: &str) -> Result<BrailleRun, BrailleError> {
    DEFAULT.transcribe(text)
}

/// Inverse of [`transcribe`] with the bundled table.
pub fn back_transcribe(run: &BrailleRun) -> Result<String, BrailleError> {
    DEFAULT.back_transcribe(run)
}
