use serde::{Deserialize, Serialize};

/// Inclusive 1-based line range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: u32,
    pub end: u32,
}

impl LineSpan {
    pub fn new(start: u32, end: u32) -> Self {
        LineSpan { start, end }
    }

    pub fn contains(&self, other: &LineSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn len(&self) -> u32 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceUnit {
    pub path: String,
    pub pragma: Option<String>,
    pub imports: Vec<String>,
    pub contracts: Vec<ContractDef>,
    pub total_lines: u32,
}

impl SourceUnit {
    pub fn contract(&self, name: &str) -> Option<&ContractDef> {
        self.contracts.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContractKind {
    Contract,
    Interface,
    Library,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractDef {
    pub name: String,
    pub kind: ContractKind,
    pub is_abstract: bool,
    /// Base contracts in declaration order, as written (dotted paths kept).
    pub base_names: Vec<String>,
    pub state_vars: Vec<StateVarDecl>,
    pub functions: Vec<FunctionDef>,
    pub events: Vec<String>,
    pub structs: Vec<String>,
    pub enums: Vec<String>,
    pub span: LineSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateVarDecl {
    pub name: String,
    pub type_text: String,
    /// User-defined type names the declared type mentions (path roots only).
    pub type_refs: Vec<String>,
    /// Contracts instantiated with `new` in the initializer.
    pub new_targets: Vec<String>,
    pub span: LineSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionKind {
    Function,
    Constructor,
    Fallback,
    Receive,
    ModifierDef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: Option<String>,
    pub type_text: String,
    pub type_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionDef {
    /// `None` for constructors, fallbacks, and receive functions.
    pub name: Option<String>,
    pub kind: FunctionKind,
    pub params: Vec<Param>,
    pub returns: Vec<Param>,
    pub body: Option<Block>,
    pub span: LineSpan,
}

impl FunctionDef {
    /// Whether the function counts as an invocable entry point (modifiers do not).
    pub fn is_callable(&self) -> bool {
        self.kind != FunctionKind::ModifierDef
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub statements: Vec<Statement>,
    pub span: LineSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StmtKind {
    /// `children[0]` is the then-branch; `children[1]`, when present, the else-branch.
    If,
    For,
    While,
    DoWhile,
    Return,
    Emit,
    Expression,
    VariableDeclaration,
    Block,
    UncheckedBlock,
    AssemblyOpaque,
    Break,
    Continue,
    RequireLike,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StmtKind,
    pub children: Vec<Statement>,
    /// `&&` and `||` operators in this statement's own expressions.
    pub condition_ops: u32,
    /// `?:` operators in this statement's own expressions.
    pub ternaries: u32,
    pub calls: Vec<CallSite>,
    pub span: LineSpan,
}

impl Statement {
    pub fn else_branch(&self) -> Option<&Statement> {
        match self.kind {
            StmtKind::If => self.children.get(1),
            _ => None,
        }
    }

    /// Pre-order walk over this statement and all nested statements.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Statement)) {
        f(self);
        for child in &self.children {
            child.walk(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallSite {
    pub callee: String,
    pub is_builtin_guard: bool,
    pub is_new_expression: bool,
}

impl CallSite {
    pub fn new(callee: impl Into<String>, is_new_expression: bool) -> Self {
        let callee = callee.into();
        let is_builtin_guard = !is_new_expression && matches!(callee.as_str(), "require" | "assert" | "revert");
        CallSite { callee, is_builtin_guard, is_new_expression }
    }
}
