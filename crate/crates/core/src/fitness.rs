//! Tree fitness against a training set.
//!
//! Trees are compiled to a postfix instruction stream that is executed over a
//! whole box's distance list at once, one column per stack slot. Every lane
//! performs exactly the scalar operations of [`ExprTree::eval`], so compiled
//! and recursive evaluation agree bit for bit.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::expr::{ExprTree, Leaf, Operator, Symbol};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Instruction {
    PushConst(f64),
    PushR,
    Apply(Operator),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledProgram {
    code: Vec<Instruction>,
    max_stack: usize,
}

impl CompiledProgram {
    pub fn instructions(&self) -> &[Instruction] {
        &self.code
    }

    pub fn max_stack(&self) -> usize {
        self.max_stack
    }
}

/// Postfix compilation of a preorder tree.
pub fn compile(tree: &ExprTree) -> CompiledProgram {
    fn emit(tree: &ExprTree, index: usize, code: &mut Vec<Instruction>) {
        for child in tree.children(index) {
            emit(tree, child, code);
        }
        code.push(match tree.symbols()[index] {
            Symbol::Leaf(Leaf::R) => Instruction::PushR,
            Symbol::Leaf(Leaf::Const(c)) => Instruction::PushConst(c as f64),
            Symbol::Op(op) => Instruction::Apply(op),
        });
    }
    let mut code = Vec::with_capacity(tree.node_count());
    emit(tree, 0, &mut code);
    let mut depth = 0usize;
    let mut max_stack = 0usize;
    for ins in &code {
        match ins {
            Instruction::PushConst(_) | Instruction::PushR => depth += 1,
            Instruction::Apply(op) => depth -= op.arity() - 1,
        }
        max_stack = max_stack.max(depth);
    }
    CompiledProgram { code, max_stack }
}

/// Runs the program at a single distance.
pub fn eval_program(program: &CompiledProgram, r: f64) -> f64 {
    let mut stack: Vec<f64> = Vec::with_capacity(program.max_stack);
    for ins in &program.code {
        match *ins {
            Instruction::PushConst(c) => stack.push(c),
            Instruction::PushR => stack.push(r),
            Instruction::Apply(Operator::Abs) => {
                let top = stack.last_mut().expect("stack underflow");
                *top = top.abs();
            }
            Instruction::Apply(op) => {
                let b = stack.pop().expect("stack underflow");
                let a = stack.last_mut().expect("stack underflow");
                *a = op.apply(*a, b);
            }
        }
    }
    stack.pop().expect("empty program")
}

/// Column stack reused across evaluations. One per worker.
#[derive(Debug, Default)]
pub struct EvalWorkspace {
    columns: Vec<Vec<f64>>,
}

impl EvalWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Evaluates `program` at every distance in `rs`; returns the result
    /// column.
    pub fn eval_batch<'a>(&'a mut self, program: &CompiledProgram, rs: &[f64]) -> &'a [f64] {
        let n = rs.len();
        if self.columns.len() < program.max_stack {
            self.columns.resize_with(program.max_stack, Vec::new);
        }
        for col in &mut self.columns[..program.max_stack] {
            col.resize(n, 0.0);
        }
        let mut sp = 0usize;
        for ins in &program.code {
            match *ins {
                Instruction::PushConst(c) => {
                    self.columns[sp].fill(c);
                    sp += 1;
                }
                Instruction::PushR => {
                    self.columns[sp].copy_from_slice(rs);
                    sp += 1;
                }
                Instruction::Apply(Operator::Abs) => {
                    for x in &mut self.columns[sp - 1] {
                        *x = x.abs();
                    }
                }
                Instruction::Apply(op) => {
                    let (lower, upper) = self.columns.split_at_mut(sp - 1);
                    let a = &mut lower[sp - 2];
                    let b = &upper[0];
                    apply_columns(op, a, b);
                    sp -= 1;
                }
            }
        }
        &self.columns[0][..n]
    }
}

#[inline]
fn apply_columns(op: Operator, a: &mut [f64], b: &[f64]) {
    match op {
        Operator::Add => a.iter_mut().zip(b).for_each(|(x, y)| *x += y),
        Operator::Sub => a.iter_mut().zip(b).for_each(|(x, y)| *x -= y),
        Operator::Mul => a.iter_mut().zip(b).for_each(|(x, y)| *x *= y),
        Operator::Div => a.iter_mut().zip(b).for_each(|(x, y)| *x /= y),
        _ => a.iter_mut().zip(b).for_each(|(x, &y)| *x = op.apply(*x, y)),
    }
}

/// Negative mean squared box-energy error, in units of energy squared.
///
/// Finite values are `<= 0`; any non-finite prediction gives `-inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Fitness(f64);

impl Fitness {
    pub const WORST: Fitness = Fitness(f64::NEG_INFINITY);

    /// Maps NaN and `+inf` to `-inf`.
    pub fn new(value: f64) -> Fitness {
        if value.is_finite() {
            Fitness(value)
        } else {
            Fitness::WORST
        }
    }

    pub fn from_mse(mse: f64) -> Fitness {
        Fitness::new(-mse)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Mean squared error, `+inf` for the worst fitness.
    pub fn mse(self) -> f64 {
        -self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Total order, larger is better.
    pub fn cmp_total(&self, other: &Fitness) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Fitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fitness of a compiled program, reusing `workspace`.
pub fn program_fitness(
    program: &CompiledProgram,
    dataset: &Dataset,
    workspace: &mut EvalWorkspace,
) -> Fitness {
    let mut sum_sq = 0.0;
    for case in &dataset.cases {
        let predicted = workspace
            .eval_batch(program, &case.distances)
            .iter()
            .fold(0.0, |acc, &e| acc + e);
        if !predicted.is_finite() {
            return Fitness::WORST;
        }
        let err = case.target_energy - predicted;
        sum_sq += err * err;
    }
    Fitness::new(-(sum_sq / dataset.cases.len() as f64))
}

pub fn tree_fitness(tree: &ExprTree, dataset: &Dataset) -> Fitness {
    program_fitness(&compile(tree), dataset, &mut EvalWorkspace::new())
}

/// Elementwise [`tree_fitness`], evaluated in parallel.
pub fn population_fitness(trees: &[ExprTree], dataset: &Dataset) -> Vec<Fitness> {
    trees
        .par_iter()
        .map_init(EvalWorkspace::new, |ws, t| program_fitness(&compile(t), dataset, ws))
        .collect()
}
