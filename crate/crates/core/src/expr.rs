//! Algebraic expression trees over the pair distance `R`.
//!
//! A tree is stored as a flat list of symbols in preorder. Every subtree is
//! therefore a contiguous slice, which makes uniform node selection, subtree
//! extraction and subtree replacement simple index arithmetic.

use std::fmt;

use num_bigint::BigUint;
use rand::Rng;
use thiserror::Error;

/// Default bound on integer constants, leaves hold values in `[-P, P]`.
pub const DEFAULT_P_MAX: i64 = 20;

/// The operator library.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Abs,
}

impl Operator {
    pub const ALL: [Operator; 6] = [
        Operator::Add,
        Operator::Sub,
        Operator::Mul,
        Operator::Div,
        Operator::Pow,
        Operator::Abs,
    ];

    pub fn arity(self) -> usize {
        match self {
            Operator::Abs => 1,
            _ => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Add => "+",
            Operator::Sub => "-",
            Operator::Mul => "*",
            Operator::Div => "/",
            Operator::Pow => "^",
            Operator::Abs => "abs",
        }
    }

    /// Applies a binary operator. `Abs` ignores its second argument.
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Operator::Add => a + b,
            Operator::Sub => a - b,
            Operator::Mul => a * b,
            Operator::Div => a / b,
            Operator::Pow => power(a, b),
            Operator::Abs => a.abs(),
        }
    }
}

/// Total power function used by every evaluator.
///
/// * `x > 0`: `x^y` (via `powf`).
/// * `x == 0`: `0` for `y > 0`, `1` for `y == 0`, NaN for `y < 0`.
/// * `x < 0`: defined only for `y` within `1e-9` of an integer, with sign
///   `(-1)^round(y)`; NaN otherwise.
///
/// NaN inputs propagate.
#[inline]
pub fn power(x: f64, y: f64) -> f64 {
    if x > 0.0 {
        x.powf(y)
    } else if x == 0.0 {
        if y > 0.0 {
            0.0
        } else if y == 0.0 {
            1.0
        } else {
            f64::NAN
        }
    } else if x < 0.0 {
        let rounded = y.round();
        if (y - rounded).abs() <= 1e-9 {
            let magnitude = (-x).powf(y);
            if rounded % 2.0 == 0.0 {
                magnitude
            } else {
                -magnitude
            }
        } else {
            f64::NAN
        }
    } else {
        f64::NAN
    }
}

/// A terminal: the pair distance or an integer constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Leaf {
    R,
    Const(i64),
}

impl Leaf {
    /// Draws one of the `2P + 2` equiprobable leaf values.
    pub fn random<G: Rng + ?Sized>(p_max: i64, rng: &mut G) -> Leaf {
        let outcomes = 2 * p_max + 2;
        match rng.random_range(0..outcomes) {
            0 => Leaf::R,
            k => Leaf::Const(k - 1 - p_max),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Op(Operator),
    Leaf(Leaf),
}

impl Symbol {
    pub fn arity(self) -> usize {
        match self {
            Symbol::Op(op) => op.arity(),
            Symbol::Leaf(_) => 0,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("depth limits must satisfy 1 <= k_min <= k_max (got {k_min}, {k_max})")]
    InvalidLimits { k_min: usize, k_max: usize },
    #[error("malformed preorder symbol list")]
    Malformed,
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
}

/// Allowed tree depths, counted in node levels (a lone leaf has depth 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DepthLimits {
    k_min: usize,
    k_max: usize,
}

impl DepthLimits {
    pub fn new(k_min: usize, k_max: usize) -> Result<Self, ExprError> {
        if k_min < 1 || k_min > k_max {
            return Err(ExprError::InvalidLimits { k_min, k_max });
        }
        Ok(DepthLimits { k_min, k_max })
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn contains(&self, depth: usize) -> bool {
        (self.k_min..=self.k_max).contains(&depth)
    }
}

impl Default for DepthLimits {
    fn default() -> Self {
        DepthLimits { k_min: 3, k_max: 4 }
    }
}

/// An immutable expression tree in preorder form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExprTree {
    symbols: Vec<Symbol>,
}

impl ExprTree {
    pub fn leaf(leaf: Leaf) -> Self {
        ExprTree { symbols: vec![Symbol::Leaf(leaf)] }
    }

    pub fn r() -> Self {
        Self::leaf(Leaf::R)
    }

    pub fn constant(value: i64) -> Self {
        Self::leaf(Leaf::Const(value))
    }

    /// Builds an `Abs` node.
    pub fn abs(child: ExprTree) -> Self {
        let mut symbols = Vec::with_capacity(child.symbols.len() + 1);
        symbols.push(Symbol::Op(Operator::Abs));
        symbols.extend(child.symbols);
        ExprTree { symbols }
    }

    /// Builds a binary node.
    ///
    /// # Panics
    ///
    /// If `op` is `Abs`.
    pub fn binary(op: Operator, lhs: ExprTree, rhs: ExprTree) -> Self {
        assert_eq!(op.arity(), 2, "{op:?} is not a binary operator");
        let mut symbols = Vec::with_capacity(lhs.symbols.len() + rhs.symbols.len() + 1);
        symbols.push(Symbol::Op(op));
        symbols.extend(lhs.symbols);
        symbols.extend(rhs.symbols);
        ExprTree { symbols }
    }

    /// Wraps a preorder symbol list after checking that it is exactly one
    /// well-formed tree.
    pub fn from_preorder(symbols: Vec<Symbol>) -> Result<Self, ExprError> {
        let mut open: usize = 1;
        for (i, s) in symbols.iter().enumerate() {
            if open == 0 {
                return Err(ExprError::Malformed);
            }
            open = open - 1 + s.arity();
            if open == 0 && i + 1 != symbols.len() {
                return Err(ExprError::Malformed);
            }
        }
        if open != 0 {
            return Err(ExprError::Malformed);
        }
        Ok(ExprTree { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn node_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn root(&self) -> Symbol {
        self.symbols[0]
    }

    /// Level of every node in preorder, the root being level 1.
    pub fn levels(&self) -> Vec<usize> {
        let mut levels = Vec::with_capacity(self.symbols.len());
        // Each stack entry is (level, remaining children) of an open operator.
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for s in &self.symbols {
            let level = stack.last().map_or(1, |&(l, _)| l + 1);
            levels.push(level);
            if let Some(top) = stack.last_mut() {
                top.1 -= 1;
            }
            if s.arity() > 0 {
                stack.push((level, s.arity()));
            }
            while matches!(stack.last(), Some(&(_, 0))) {
                stack.pop();
            }
        }
        levels
    }

    pub fn depth(&self) -> usize {
        self.levels().into_iter().max().unwrap_or(0)
    }

    /// Exclusive end index of the subtree rooted at `start`.
    pub fn subtree_end(&self, start: usize) -> usize {
        let mut open = 1usize;
        let mut i = start;
        while open > 0 {
            open = open - 1 + self.symbols[i].arity();
            i += 1;
        }
        i
    }

    /// Indices of the children of the node at `index`, in order.
    pub fn children(&self, index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.symbols[index].arity());
        let mut next = index + 1;
        for _ in 0..self.symbols[index].arity() {
            out.push(next);
            next = self.subtree_end(next);
        }
        out
    }

    pub fn subtree(&self, index: usize) -> ExprTree {
        ExprTree { symbols: self.symbols[index..self.subtree_end(index)].to_vec() }
    }

    /// Returns a copy with the subtree at `index` replaced by `replacement`.
    pub fn replace_subtree(&self, index: usize, replacement: &ExprTree) -> ExprTree {
        let end = self.subtree_end(index);
        let mut symbols =
            Vec::with_capacity(self.symbols.len() - (end - index) + replacement.symbols.len());
        symbols.extend_from_slice(&self.symbols[..index]);
        symbols.extend_from_slice(&replacement.symbols);
        symbols.extend_from_slice(&self.symbols[end..]);
        ExprTree { symbols }
    }

    /// Indices of all nodes sitting at `level`.
    pub fn nodes_at_level(&self, level: usize) -> Vec<usize> {
        self.levels()
            .into_iter()
            .enumerate()
            .filter_map(|(i, l)| (l == level).then_some(i))
            .collect()
    }

    /// Direct recursive evaluation at distance `r`.
    pub fn eval(&self, r: f64) -> f64 {
        fn go(symbols: &[Symbol], i: &mut usize, r: f64) -> f64 {
            let s = symbols[*i];
            *i += 1;
            match s {
                Symbol::Leaf(Leaf::R) => r,
                Symbol::Leaf(Leaf::Const(c)) => c as f64,
                Symbol::Op(Operator::Abs) => go(symbols, i, r).abs(),
                Symbol::Op(op) => {
                    let a = go(symbols, i, r);
                    let b = go(symbols, i, r);
                    op.apply(a, b)
                }
            }
        }
        let mut i = 0;
        go(&self.symbols, &mut i, r)
    }

    pub fn to_infix(&self) -> String {
        let mut out = String::new();
        self.write_node(0, &mut out);
        out
    }

    fn write_node(&self, index: usize, out: &mut String) {
        match self.symbols[index] {
            Symbol::Leaf(Leaf::R) => out.push('R'),
            Symbol::Leaf(Leaf::Const(c)) if c < 0 => out.push_str(&format!("({c})")),
            Symbol::Leaf(Leaf::Const(c)) => out.push_str(&c.to_string()),
            Symbol::Op(Operator::Abs) => {
                out.push_str("abs(");
                self.write_node(index + 1, out);
                out.push(')');
            }
            Symbol::Op(op) => {
                let children = self.children(index);
                self.write_operand(children[0], out);
                match op {
                    Operator::Add | Operator::Sub => {
                        out.push(' ');
                        out.push_str(op.symbol());
                        out.push(' ');
                    }
                    _ => out.push_str(op.symbol()),
                }
                self.write_operand(children[1], out);
            }
        }
    }

    fn write_operand(&self, index: usize, out: &mut String) {
        let compound = matches!(self.symbols[index], Symbol::Op(op) if op.arity() == 2);
        if compound {
            out.push('(');
        }
        self.write_node(index, out);
        if compound {
            out.push(')');
        }
    }
}

impl fmt::Display for ExprTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_infix())
    }
}

impl std::str::FromStr for ExprTree {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_infix(s)
    }
}

/// Grows a random tree whose depth lies in `limits`.
///
/// A designated spine path is forced to keep growing operators until it
/// reaches `k_min` levels; every other node is an operator or a leaf with
/// equal probability until the `k_max` budget runs out.
pub fn random_tree<G: Rng + ?Sized>(limits: DepthLimits, p_max: i64, rng: &mut G) -> ExprTree {
    random_subtree(limits.k_min, limits.k_max, p_max, rng)
}

fn random_subtree<G: Rng + ?Sized>(
    min_depth: usize,
    max_depth: usize,
    p_max: i64,
    rng: &mut G,
) -> ExprTree {
    debug_assert!(1 <= max_depth && min_depth <= max_depth);
    let mut symbols = Vec::new();
    grow(&mut symbols, max_depth, min_depth, p_max, rng);
    ExprTree { symbols }
}

fn grow<G: Rng + ?Sized>(
    out: &mut Vec<Symbol>,
    budget: usize,
    need: usize,
    p_max: i64,
    rng: &mut G,
) {
    let operator = if budget <= 1 {
        false
    } else if need > 1 {
        true
    } else {
        rng.random_bool(0.5)
    };
    if !operator {
        out.push(Symbol::Leaf(Leaf::random(p_max, rng)));
        return;
    }
    let op = Operator::ALL[rng.random_range(0..Operator::ALL.len())];
    out.push(Symbol::Op(op));
    let spine = if need > 1 { Some(rng.random_range(0..op.arity())) } else { None };
    for child in 0..op.arity() {
        let child_need = if spine == Some(child) { need - 1 } else { 0 };
        grow(out, budget - 1, child_need, p_max, rng);
    }
}

/// Number of retries before crossover gives up and returns parent A.
pub const CROSSOVER_RETRIES: usize = 16;

/// Produces one child: parent A with a subtree replaced by a subtree of
/// parent B, both taken from the same non-root, non-maximal depth level.
pub fn crossover<G: Rng + ?Sized>(
    parent_a: &ExprTree,
    parent_b: &ExprTree,
    limits: DepthLimits,
    rng: &mut G,
) -> ExprTree {
    let levels_a = parent_a.levels();
    let levels_b = parent_b.levels();
    let depth_a = levels_a.iter().copied().max().unwrap_or(1);
    let depth_b = levels_b.iter().copied().max().unwrap_or(1);
    let top = depth_a.min(limits.k_max).saturating_sub(1);
    if top < 2 {
        return parent_a.clone();
    }
    for _ in 0..CROSSOVER_RETRIES {
        let level = rng.random_range(2..=top);
        let site_a = pick_at_level(&levels_a, level, rng);
        let level_b = level.min(depth_b);
        if level_b < 2 {
            continue;
        }
        let site_b = pick_at_level(&levels_b, level_b, rng);
        let child = parent_a.replace_subtree(site_a, &parent_b.subtree(site_b));
        if limits.contains(child.depth()) {
            return child;
        }
    }
    parent_a.clone()
}

fn pick_at_level<G: Rng + ?Sized>(levels: &[usize], level: usize, rng: &mut G) -> usize {
    let candidates: Vec<usize> = levels
        .iter()
        .enumerate()
        .filter_map(|(i, &l)| (l == level).then_some(i))
        .collect();
    candidates[rng.random_range(0..candidates.len())]
}

/// Node chosen for mutation: uniform over all nodes.
pub fn mutation_site<G: Rng + ?Sized>(tree: &ExprTree, rng: &mut G) -> usize {
    rng.random_range(0..tree.node_count())
}

/// Replaces a uniformly chosen subtree with a fresh random one.
pub fn mutate<G: Rng + ?Sized>(
    tree: &ExprTree,
    limits: DepthLimits,
    p_max: i64,
    rng: &mut G,
) -> ExprTree {
    let site = mutation_site(tree, rng);
    mutate_at(tree, site, limits, p_max, rng)
}

/// Replaces the subtree at `site` with a random subtree sized so that the
/// whole tree stays within `limits`.
pub fn mutate_at<G: Rng + ?Sized>(
    tree: &ExprTree,
    site: usize,
    limits: DepthLimits,
    p_max: i64,
    rng: &mut G,
) -> ExprTree {
    let level = tree.levels()[site];
    let max_depth = (limits.k_max + 1).saturating_sub(level).max(1);
    let rest_depth = tree.replace_subtree(site, &ExprTree::r()).depth();
    let min_depth = if rest_depth >= limits.k_min {
        1
    } else {
        (limits.k_min + 1 - level).clamp(1, max_depth)
    };
    let fresh = random_subtree(min_depth, max_depth, p_max, rng);
    tree.replace_subtree(site, &fresh)
}

/// Size of the space of maximal trees with `m` binary operators, depth `k`
/// (in operator levels) and integer constants in `[-p, p]`:
/// `(2p + 2)^(2^k) * m^(2^k - 1)`.
///
/// # Panics
///
/// If `k >= 32`.
pub fn count_search_space(m: u64, k: u32, p: u64) -> BigUint {
    assert!(k < 32, "depth {k} is too large to count");
    let leaves = 1u32 << k;
    let leaf_values = BigUint::from(2 * p + 2).pow(leaves);
    let operators = BigUint::from(m).pow(leaves - 1);
    leaf_values * operators
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Token {
    R,
    Int(i64),
    Abs,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

/// Parses the infix grammar produced by [`ExprTree::to_infix`].
pub fn parse_infix(src: &str) -> Result<ExprTree, ExprError> {
    let mut parser = Parser { src, pos: 0 };
    let mut symbols = Vec::new();
    parser.expr(&mut symbols)?;
    let (offset, tok) = parser.peek()?;
    if let Some(tok) = tok {
        return Err(parse_error(offset, format!("unexpected {tok:?}")));
    }
    Ok(ExprTree { symbols })
}

fn parse_error(offset: usize, message: impl Into<String>) -> ExprError {
    ExprError::Parse { offset, message: message.into() }
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Next token and its offset without consuming it.
    fn peek(&mut self) -> Result<(usize, Option<Token>), ExprError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((start, None));
        };
        let tok = match c {
            'R' => Token::R,
            '+' => Token::Plus,
            '-' | '\u{2212}' => Token::Minus,
            '*' => Token::Star,
            '/' => Token::Slash,
            '^' => Token::Caret,
            '(' => Token::LParen,
            ')' => Token::RParen,
            'a' if rest.starts_with("abs") => Token::Abs,
            d if d.is_ascii_digit() => {
                let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
                let value = rest[..digits]
                    .parse::<i64>()
                    .map_err(|e| parse_error(start, e.to_string()))?;
                Token::Int(value)
            }
            other => return Err(parse_error(start, format!("unexpected character {other:?}"))),
        };
        Ok((start, Some(tok)))
    }

    fn bump(&mut self) -> Result<(usize, Option<Token>), ExprError> {
        let (offset, tok) = self.peek()?;
        self.pos += match tok {
            None => 0,
            Some(Token::Abs) => 3,
            Some(Token::Int(_)) => {
                self.src[offset..].bytes().take_while(u8::is_ascii_digit).count()
            }
            Some(Token::Minus) => self.src[offset..].chars().next().map_or(1, char::len_utf8),
            Some(_) => 1,
        };
        Ok((offset, tok))
    }

    fn expect(&mut self, want: Token) -> Result<(), ExprError> {
        let (offset, tok) = self.bump()?;
        match tok {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(parse_error(offset, format!("expected {want:?}, found {t:?}"))),
            None => Err(parse_error(offset, format!("expected {want:?}, found end of input"))),
        }
    }

    // Binary operators are folded left by inserting the operator symbol in
    // front of the already-emitted left operand.
    fn expr(&mut self, out: &mut Vec<Symbol>) -> Result<(), ExprError> {
        let start = out.len();
        self.term(out)?;
        loop {
            let op = match self.peek()?.1 {
                Some(Token::Plus) => Operator::Add,
                Some(Token::Minus) => Operator::Sub,
                _ => return Ok(()),
            };
            self.bump()?;
            out.insert(start, Symbol::Op(op));
            self.term(out)?;
        }
    }

    fn term(&mut self, out: &mut Vec<Symbol>) -> Result<(), ExprError> {
        let start = out.len();
        self.factor(out)?;
        loop {
            let op = match self.peek()?.1 {
                Some(Token::Star) => Operator::Mul,
                Some(Token::Slash) => Operator::Div,
                _ => return Ok(()),
            };
            self.bump()?;
            out.insert(start, Symbol::Op(op));
            self.factor(out)?;
        }
    }

    fn factor(&mut self, out: &mut Vec<Symbol>) -> Result<(), ExprError> {
        let start = out.len();
        self.primary(out)?;
        if self.peek()?.1 == Some(Token::Caret) {
            self.bump()?;
            out.insert(start, Symbol::Op(Operator::Pow));
            self.factor(out)?;
        }
        Ok(())
    }

    fn primary(&mut self, out: &mut Vec<Symbol>) -> Result<(), ExprError> {
        let (offset, tok) = self.bump()?;
        match tok {
            Some(Token::R) => out.push(Symbol::Leaf(Leaf::R)),
            Some(Token::Int(v)) => out.push(Symbol::Leaf(Leaf::Const(v))),
            Some(Token::Minus) => match self.bump()? {
                (_, Some(Token::Int(v))) => out.push(Symbol::Leaf(Leaf::Const(-v))),
                (at, _) => return Err(parse_error(at, "expected integer after '-'")),
            },
            Some(Token::LParen) => {
                self.expr(out)?;
                self.expect(Token::RParen)?;
            }
            Some(Token::Abs) => {
                out.push(Symbol::Op(Operator::Abs));
                self.expect(Token::LParen)?;
                self.expr(out)?;
                self.expect(Token::RParen)?;
            }
            Some(t) => return Err(parse_error(offset, format!("unexpected {t:?}"))),
            None => return Err(parse_error(offset, "unexpected end of input")),
        }
        Ok(())
    }
}
