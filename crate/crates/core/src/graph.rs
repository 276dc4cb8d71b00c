//! Signed causal graphs over the three variables X, W and Y.
//!
//! A [`CausalGraph`] holds one [`EdgeSpec`] per unordered pair of variables.
//! Only the W–X edge may carry a negative sign; the X–Y edge, when present,
//! is always positive. Graphs are written in a compact notation such as
//! `X<-nW->Y,X->Y`: the first part describes how W relates to X and Y (a
//! leading `n` on W marks a negative W–X effect), the second part how X
//! relates to Y.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Magnitude of every structural coefficient, `1/√3`.
pub const EDGE_COEFFICIENT: f64 = 0.577_350_269_189_625_8;

/// One of the three observed variables. The discriminant is the index used
/// by every 3×3 matrix in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X = 0,
    W = 1,
    Y = 2,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::W, Var::Y];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "X",
            Var::W => "W",
            Var::Y => "Y",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// Direction of an edge relative to the ordered pair it is stored under.
/// For `wx` the pair is (W, X), for `wy` it is (W, Y), for `xy` it is (X, Y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    TowardFirst,
    TowardSecond,
    Absent,
}

/// An edge between two variables. The sign of an absent edge is always
/// stored as positive so structural equality is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeSpec {
    orientation: Orientation,
    sign: Sign,
}

impl EdgeSpec {
    pub const ABSENT: EdgeSpec = EdgeSpec {
        orientation: Orientation::Absent,
        sign: Sign::Positive,
    };

    pub fn new(orientation: Orientation, sign: Sign) -> Self {
        let sign = match orientation {
            Orientation::Absent => Sign::Positive,
            _ => sign,
        };
        EdgeSpec { orientation, sign }
    }

    pub fn toward_first(sign: Sign) -> Self {
        Self::new(Orientation::TowardFirst, sign)
    }

    pub fn toward_second(sign: Sign) -> Self {
        Self::new(Orientation::TowardSecond, sign)
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn is_present(&self) -> bool {
        self.orientation != Orientation::Absent
    }

    /// Signed structural coefficient carried by this edge (0 when absent).
    pub fn coefficient(&self) -> f64 {
        if self.is_present() {
            self.sign.factor() * EDGE_COEFFICIENT
        } else {
            0.0
        }
    }

    fn with_sign(self, sign: Sign) -> Self {
        Self::new(self.orientation, sign)
    }
}

/// A directed, signed edge `parent -> child`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectedEdge {
    pub parent: Var,
    pub child: Var,
    pub sign: Sign,
}

impl DirectedEdge {
    pub fn coefficient(&self) -> f64 {
        self.sign.factor() * EDGE_COEFFICIENT
    }
}

/// Acyclic signed graph over X, W and Y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CausalGraph {
    wx: EdgeSpec,
    wy: EdgeSpec,
    xy: EdgeSpec,
}

impl CausalGraph {
    /// Builds a graph, rejecting directed cycles and negative signs outside
    /// the W–X edge.
    pub fn new(wx: EdgeSpec, wy: EdgeSpec, xy: EdgeSpec) -> Result<Self, GraphError> {
        if wy.sign == Sign::Negative {
            return Err(GraphError::Sign("W-Y"));
        }
        if xy.sign == Sign::Negative {
            return Err(GraphError::Sign("X-Y"));
        }
        let graph = CausalGraph { wx, wy, xy };
        if graph.topological_order().is_none() {
            return Err(GraphError::Cycle(graph.format_unchecked()));
        }
        Ok(graph)
    }

    pub fn empty() -> Self {
        CausalGraph {
            wx: EdgeSpec::ABSENT,
            wy: EdgeSpec::ABSENT,
            xy: EdgeSpec::ABSENT,
        }
    }

    pub fn wx(&self) -> EdgeSpec {
        self.wx
    }

    pub fn wy(&self) -> EdgeSpec {
        self.wy
    }

    pub fn xy(&self) -> EdgeSpec {
        self.xy
    }

    /// The same graph with the W–X sign replaced. An absent W–X edge stays
    /// absent (and positive).
    pub fn with_wx_sign(&self, sign: Sign) -> Self {
        CausalGraph {
            wx: self.wx.with_sign(sign),
            ..*self
        }
    }

    /// All present edges as `parent -> child`, in (wx, wy, xy) order.
    pub fn directed_edges(&self) -> Vec<DirectedEdge> {
        let pairs = [
            (self.wx, Var::W, Var::X),
            (self.wy, Var::W, Var::Y),
            (self.xy, Var::X, Var::Y),
        ];
        pairs
            .into_iter()
            .filter_map(|(edge, first, second)| {
                let (parent, child) = match edge.orientation {
                    Orientation::TowardFirst => (second, first),
                    Orientation::TowardSecond => (first, second),
                    Orientation::Absent => return None,
                };
                Some(DirectedEdge {
                    parent,
                    child,
                    sign: edge.sign,
                })
            })
            .collect()
    }

    pub fn parents(&self, v: Var) -> Vec<Var> {
        self.directed_edges()
            .into_iter()
            .filter(|e| e.child == v)
            .map(|e| e.parent)
            .collect()
    }

    /// Kahn ordering with ties broken in X, W, Y order; `None` on a cycle.
    pub fn topological_order(&self) -> Option<[Var; 3]> {
        let edges = self.directed_edges();
        let mut placed = [false; 3];
        let mut order = [Var::X; 3];
        for slot in order.iter_mut() {
            let next = Var::ALL.into_iter().find(|&v| {
                !placed[v.index()]
                    && edges
                        .iter()
                        .all(|e| e.child != v || placed[e.parent.index()])
            })?;
            placed[next.index()] = true;
            *slot = next;
        }
        Some(order)
    }

    /// Total causal effect of X on Y: the sum over directed X→Y paths of the
    /// product of signed edge coefficients.
    pub fn true_effect(&self) -> f64 {
        let edges = self.directed_edges();
        let coefficient = |parent: Var, child: Var| {
            edges
                .iter()
                .find(|e| e.parent == parent && e.child == child)
                .map(DirectedEdge::coefficient)
        };
        let direct = coefficient(Var::X, Var::Y).unwrap_or(0.0);
        let through_w = match (coefficient(Var::X, Var::W), coefficient(Var::W, Var::Y)) {
            (Some(a), Some(b)) => a * b,
            _ => 0.0,
        };
        direct + through_w
    }

    pub fn xy_relation(&self) -> XyRelation {
        match self.xy.orientation {
            Orientation::TowardSecond => XyRelation::XCausesY,
            Orientation::TowardFirst => XyRelation::YCausesX,
            Orientation::Absent => XyRelation::None,
        }
    }

    fn format_unchecked(&self) -> String {
        let arrow = |edge: EdgeSpec, toward_first: &'static str, toward_second: &'static str| {
            match edge.orientation {
                Orientation::TowardFirst => toward_first,
                Orientation::TowardSecond => toward_second,
                Orientation::Absent => "-",
            }
        };
        let n = if self.wx.sign == Sign::Negative { "n" } else { "" };
        format!(
            "X{}{}W{}Y,X{}Y",
            arrow(self.wx, "->", "<-"),
            n,
            arrow(self.wy, "<-", "->"),
            arrow(self.xy, "<-", "->"),
        )
    }
}

impl fmt::Display for CausalGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_unchecked())
    }
}

impl FromStr for CausalGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_graph(s)
    }
}

/// Canonical notation for a graph; inverse of [`parse_graph`].
pub fn format_graph(graph: &CausalGraph) -> String {
    graph.format_unchecked()
}

struct Cursor<'a> {
    rest: &'a str,
    source: &'a str,
}

impl<'a> Cursor<'a> {
    fn syntax(&self, what: &str) -> GraphError {
        GraphError::Syntax {
            notation: self.source.to_string(),
            reason: what.to_string(),
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), GraphError> {
        match self.rest.strip_prefix(token) {
            Some(rest) => {
                self.rest = rest;
                Ok(())
            }
            None => Err(self.syntax(&format!("expected `{token}`"))),
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        match self.rest.strip_prefix(token) {
            Some(rest) => {
                self.rest = rest;
                true
            }
            None => false,
        }
    }

    /// `->`, `<-` or `-`, as an orientation relative to (left, right).
    fn link(&mut self) -> Result<Orientation, GraphError> {
        if self.eat("->") {
            Ok(Orientation::TowardSecond)
        } else if self.eat("<-") {
            Ok(Orientation::TowardFirst)
        } else if self.eat("-") {
            Ok(Orientation::Absent)
        } else {
            Err(self.syntax("expected `->`, `<-` or `-`"))
        }
    }

    fn negation(&mut self) -> Sign {
        if self.eat("n") {
            Sign::Negative
        } else {
            Sign::Positive
        }
    }
}

fn flip(orientation: Orientation) -> Orientation {
    match orientation {
        Orientation::TowardFirst => Orientation::TowardSecond,
        Orientation::TowardSecond => Orientation::TowardFirst,
        Orientation::Absent => Orientation::Absent,
    }
}

/// Parses `<W-part>,<XY-part>`, e.g. `X<-nW->Y,X-Y`. Whitespace is ignored.
pub fn parse_graph(notation: &str) -> Result<CausalGraph, GraphError> {
    let compact: String = notation.chars().filter(|c| !c.is_whitespace()).collect();
    let mut cur = Cursor {
        rest: &compact,
        source: notation,
    };

    cur.expect("X")?;
    // The link is written X..W, but stored relative to (W, X).
    let x_w = flip(cur.link()?);
    let wx_sign = cur.negation();
    cur.expect("W")?;
    let w_y = cur.link()?;
    let wy_sign = cur.negation();
    cur.expect("Y")?;
    cur.expect(",")?;
    cur.expect("X")?;
    let x_y = cur.link()?;
    let xy_sign = cur.negation();
    cur.expect("Y")?;
    if !cur.rest.is_empty() {
        return Err(cur.syntax("trailing input"));
    }

    let checked = |orientation: Orientation, sign: Sign, label: &'static str| {
        if orientation == Orientation::Absent && sign == Sign::Negative {
            Err(GraphError::Sign(label))
        } else {
            Ok(EdgeSpec::new(orientation, sign))
        }
    };
    CausalGraph::new(
        checked(x_w, wx_sign, "W-X")?,
        checked(w_y, wy_sign, "W-Y")?,
        checked(x_y, xy_sign, "X-Y")?,
    )
}

/// How W relates to X and Y; one figure of the study per class, except
/// that twisted chains share the figure of their untwisted chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WClass {
    Confounding,
    TwistedConfounding,
    Collider,
    TwistedCollider,
    Instrumental,
    WeakConfounding,
    PostTreatment,
    PostResponse,
    Irrelevant,
    ForwardChain,
    TwistedForwardChain,
    BackwardChain,
    TwistedBackwardChain,
}

impl WClass {
    pub const ALL: [WClass; 13] = [
        WClass::Confounding,
        WClass::TwistedConfounding,
        WClass::Collider,
        WClass::TwistedCollider,
        WClass::Instrumental,
        WClass::WeakConfounding,
        WClass::PostTreatment,
        WClass::PostResponse,
        WClass::Irrelevant,
        WClass::ForwardChain,
        WClass::TwistedForwardChain,
        WClass::BackwardChain,
        WClass::TwistedBackwardChain,
    ];

    /// The W–X and W–Y edges defining the class.
    pub fn w_edges(self) -> (EdgeSpec, EdgeSpec) {
        use Sign::{Negative as Neg, Positive as Pos};
        let into_x = EdgeSpec::toward_second;
        let from_x = EdgeSpec::toward_first;
        let into_y = EdgeSpec::toward_second(Pos);
        let from_y = EdgeSpec::toward_first(Pos);
        let none = EdgeSpec::ABSENT;
        match self {
            WClass::Confounding => (into_x(Pos), into_y),
            WClass::TwistedConfounding => (into_x(Neg), into_y),
            WClass::Collider => (from_x(Pos), from_y),
            WClass::TwistedCollider => (from_x(Neg), from_y),
            WClass::Instrumental => (into_x(Pos), none),
            WClass::WeakConfounding => (none, into_y),
            WClass::PostTreatment => (from_x(Pos), none),
            WClass::PostResponse => (none, from_y),
            WClass::Irrelevant => (none, none),
            WClass::ForwardChain => (from_x(Pos), into_y),
            WClass::TwistedForwardChain => (from_x(Neg), into_y),
            WClass::BackwardChain => (into_x(Pos), from_y),
            WClass::TwistedBackwardChain => (into_x(Neg), from_y),
        }
    }

    fn from_w_edges(wx: EdgeSpec, wy: EdgeSpec) -> Option<WClass> {
        Self::ALL.into_iter().find(|c| c.w_edges() == (wx, wy))
    }

    /// Notation of the W-part, e.g. `X<-nW->Y`.
    pub fn w_notation(self) -> String {
        let (wx, wy) = self.w_edges();
        let graph = CausalGraph {
            wx,
            wy,
            xy: EdgeSpec::ABSENT,
        };
        let full = graph.format_unchecked();
        full.split(',').next().unwrap_or_default().to_string()
    }

    pub fn label(self) -> &'static str {
        match self {
            WClass::Confounding => "Confounding",
            WClass::TwistedConfounding => "Twisted Confounding",
            WClass::Collider => "W as a collider",
            WClass::TwistedCollider => "W as a twisted collider",
            WClass::Instrumental => "Instrumental W",
            WClass::WeakConfounding => "Weak Confounding",
            WClass::PostTreatment => "W Post Treatment",
            WClass::PostResponse => "W Post Response",
            WClass::Irrelevant => "W Irrelevant",
            WClass::ForwardChain => "Forward Chain",
            WClass::TwistedForwardChain => "Twisted Forward Chain",
            WClass::BackwardChain => "Backward Chain",
            WClass::TwistedBackwardChain => "Twisted Backward Chain",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            WClass::Confounding => "Confounding",
            WClass::TwistedConfounding => "TwistedConfounding",
            WClass::Collider => "Collider",
            WClass::TwistedCollider => "TwistedCollider",
            WClass::Instrumental => "Instrumental",
            WClass::WeakConfounding => "WeakConfounding",
            WClass::PostTreatment => "PostTreatment",
            WClass::PostResponse => "PostResponse",
            WClass::Irrelevant => "Irrelevant",
            WClass::ForwardChain => "ForwardChain",
            WClass::TwistedForwardChain => "TwistedForwardChain",
            WClass::BackwardChain => "BackwardChain",
            WClass::TwistedBackwardChain => "TwistedBackwardChain",
        }
    }
}

impl fmt::Display for WClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WClass {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| GraphError::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum XyRelation {
    #[serde(rename = "x_causes_y")]
    XCausesY,
    #[serde(rename = "y_causes_x")]
    YCausesX,
    #[serde(rename = "none")]
    None,
}

impl XyRelation {
    /// Panel order within a figure.
    pub const ALL: [XyRelation; 3] = [XyRelation::XCausesY, XyRelation::YCausesX, XyRelation::None];

    pub fn edge(self) -> EdgeSpec {
        match self {
            XyRelation::XCausesY => EdgeSpec::toward_second(Sign::Positive),
            XyRelation::YCausesX => EdgeSpec::toward_first(Sign::Positive),
            XyRelation::None => EdgeSpec::ABSENT,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            XyRelation::XCausesY => "x_causes_y",
            XyRelation::YCausesX => "y_causes_x",
            XyRelation::None => "none",
        }
    }

    pub fn notation(self) -> &'static str {
        match self {
            XyRelation::XCausesY => "X->Y",
            XyRelation::YCausesX => "X<-Y",
            XyRelation::None => "X-Y",
        }
    }
}

impl fmt::Display for XyRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for XyRelation {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| GraphError::UnknownName(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphClass {
    pub w_class: WClass,
    pub xy_relation: XyRelation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry {
    pub id: u32,
    pub graph: CausalGraph,
    pub class: GraphClass,
    pub notation: String,
}

impl CatalogEntry {
    pub fn true_effect(&self) -> f64 {
        self.graph.true_effect()
    }
}

/// One figure of the study: a W-relationship with three panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FigureLayout {
    pub number: u32,
    pub w_class: WClass,
    pub caption: &'static str,
    pub panels: [GraphClass; 3],
}

const fn panel(w_class: WClass, xy_relation: XyRelation) -> GraphClass {
    GraphClass {
        w_class,
        xy_relation,
    }
}

const fn standard_panels(w_class: WClass) -> [GraphClass; 3] {
    [
        panel(w_class, XyRelation::XCausesY),
        panel(w_class, XyRelation::YCausesX),
        panel(w_class, XyRelation::None),
    ]
}

/// The eleven figures in publication order. In the two chain figures the
/// cyclic panel is replaced, in place, by its twisted counterpart.
pub const FIGURES: [FigureLayout; 11] = [
    FigureLayout {
        number: 1,
        w_class: WClass::Confounding,
        caption: "Confounding: X <- W -> Y",
        panels: standard_panels(WClass::Confounding),
    },
    FigureLayout {
        number: 2,
        w_class: WClass::TwistedConfounding,
        caption: "Twisted Confounding: X <-n W -> Y",
        panels: standard_panels(WClass::TwistedConfounding),
    },
    FigureLayout {
        number: 3,
        w_class: WClass::Collider,
        caption: "W as a collider: X -> W <- Y",
        panels: standard_panels(WClass::Collider),
    },
    FigureLayout {
        number: 4,
        w_class: WClass::TwistedCollider,
        caption: "W as a twisted collider: X ->n W <- Y",
        panels: standard_panels(WClass::TwistedCollider),
    },
    FigureLayout {
        number: 5,
        w_class: WClass::Instrumental,
        caption: "Instrumental W: X <- W - Y",
        panels: standard_panels(WClass::Instrumental),
    },
    FigureLayout {
        number: 6,
        w_class: WClass::WeakConfounding,
        caption: "Weak Confounding: X - W -> Y",
        panels: standard_panels(WClass::WeakConfounding),
    },
    FigureLayout {
        number: 7,
        w_class: WClass::PostTreatment,
        caption: "W Post Treatment: X -> W - Y",
        panels: standard_panels(WClass::PostTreatment),
    },
    FigureLayout {
        number: 8,
        w_class: WClass::PostResponse,
        caption: "W Post Response: X - W <- Y",
        panels: standard_panels(WClass::PostResponse),
    },
    FigureLayout {
        number: 9,
        w_class: WClass::Irrelevant,
        caption: "W Irrelevant: X - W - Y",
        panels: standard_panels(WClass::Irrelevant),
    },
    FigureLayout {
        number: 10,
        w_class: WClass::ForwardChain,
        caption: "Forward Chain: X -> W -> Y; cycle excluded, replaced by twisted forward chain",
        panels: [
            panel(WClass::ForwardChain, XyRelation::XCausesY),
            panel(WClass::TwistedForwardChain, XyRelation::XCausesY),
            panel(WClass::ForwardChain, XyRelation::None),
        ],
    },
    FigureLayout {
        number: 11,
        w_class: WClass::BackwardChain,
        caption: "Backward Chain: X <- W <- Y; cycle excluded, replaced by twisted backward chain",
        panels: [
            panel(WClass::TwistedBackwardChain, XyRelation::YCausesX),
            panel(WClass::BackwardChain, XyRelation::YCausesX),
            panel(WClass::BackwardChain, XyRelation::None),
        ],
    },
];

/// The 33 data-generating graphs with stable ids 1..=33 in figure order.
pub fn enumerate_catalog() -> Vec<CatalogEntry> {
    FIGURES
        .iter()
        .flat_map(|fig| fig.panels.iter())
        .enumerate()
        .map(|(i, class)| {
            let (wx, wy) = class.w_class.w_edges();
            let graph = CausalGraph::new(wx, wy, class.xy_relation.edge())
                .expect("figure panels are acyclic");
            CatalogEntry {
                id: i as u32 + 1,
                graph,
                class: *class,
                notation: format_graph(&graph),
            }
        })
        .collect()
}

/// The figure a panel class belongs to.
pub fn figure_of(class: GraphClass) -> Option<&'static FigureLayout> {
    FIGURES.iter().find(|f| f.panels.contains(&class))
}

/// Classifies a catalog graph by its W-relationship and X–Y direction.
pub fn classify(graph: &CausalGraph) -> Result<GraphClass, GraphError> {
    let unknown = || GraphError::UnknownClass(graph.to_string());
    let w_class = WClass::from_w_edges(graph.wx, graph.wy).ok_or_else(unknown)?;
    let class = GraphClass {
        w_class,
        xy_relation: graph.xy_relation(),
    };
    figure_of(class).map(|_| class).ok_or_else(unknown)
}

/// Catalog exported as JSON objects.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub id: u32,
    pub notation: String,
    pub w_class: WClass,
    pub xy_relation: XyRelation,
    pub true_effect: f64,
}

impl From<&CatalogEntry> for CatalogRecord {
    fn from(e: &CatalogEntry) -> Self {
        CatalogRecord {
            id: e.id,
            notation: e.notation.clone(),
            w_class: e.class.w_class,
            xy_relation: e.class.xy_relation,
            true_effect: e.true_effect(),
        }
    }
}

pub fn catalog_json(catalog: &[CatalogEntry]) -> String {
    let records: Vec<CatalogRecord> = catalog.iter().map(CatalogRecord::from).collect();
    serde_json::to_string_pretty(&records).expect("catalog records serialize")
}
