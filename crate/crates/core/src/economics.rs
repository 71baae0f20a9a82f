//! Bill-of-materials roll-up, budget compliance and unit pricing.
//!
//! Money is carried as exact decimals and rounded half-up to cents only when
//! a result is produced.

use rust_decimal::{Decimal, RoundingStrategy};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// US dollars as an exact decimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Usd(pub Decimal);

impl Usd {
    pub const ZERO: Usd = Usd(Decimal::ZERO);

    pub fn from_cents(cents: i64) -> Self {
        Usd(Decimal::new(cents, 2))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Decimal::from_str(text.trim())
            .map(Usd)
            .map_err(|e| Error::Configuration(format!("invalid amount '{text}': {e}")))
    }

    /// Half-up rounding to whole cents.
    pub fn round_cents(self) -> Self {
        Usd(self.0.round_dp_with_strategy(2, RoundingStrategy::MidpointAwayFromZero))
    }

    pub fn to_f64(self) -> f64 {
        use rust_decimal::prelude::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_negative(self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }
}

impl fmt::Display for Usd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2}", self.0)
    }
}

impl std::ops::Add for Usd {
    type Output = Usd;
    fn add(self, rhs: Usd) -> Usd {
        Usd(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Usd {
    type Output = Usd;
    fn sub(self, rhs: Usd) -> Usd {
        Usd(self.0 - rhs.0)
    }
}

impl std::iter::Sum for Usd {
    fn sum<I: Iterator<Item = Usd>>(iter: I) -> Usd {
        iter.fold(Usd::ZERO, |a, b| a + b)
    }
}

impl Serialize for Usd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for Usd {
    /// Accepts a JSON number or a decimal string. Numbers go through their
    /// shortest round-trip text, so `199.25` is read as exactly 199.25.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Num(x) if x.is_finite() => format!("{x}"),
            Raw::Num(x) => return Err(serde::de::Error::custom(format!("non-finite amount {x}"))),
            Raw::Text(t) => t,
        };
        Usd::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BomCategory {
    Motor,
    Controller,
    Structure,
    Sensor,
    Misc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BomItem {
    pub name: String,
    pub unit_cost: Usd,
    pub quantity: u32,
    pub category: BomCategory,
}

impl BomItem {
    pub fn extended(&self) -> Usd {
        Usd(self.unit_cost.0 * Decimal::from(self.quantity))
    }
}

/// On-disk BOM: items plus an optional free-form note.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bom {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub items: Vec<BomItem>,
}

impl Bom {
    pub fn validate(&self) -> Result<()> {
        for item in &self.items {
            if item.unit_cost.is_negative() {
                return Err(Error::Validation(format!("'{}' has a negative unit cost", item.name)));
            }
            if item.quantity == 0 {
                return Err(Error::Validation(format!("'{}' has zero quantity", item.name)));
            }
        }
        Ok(())
    }
}

/// Sum of unit cost times quantity, rounded to cents.
pub fn bom_total(items: &[BomItem]) -> Usd {
    items.iter().map(BomItem::extended).sum::<Usd>().round_cents()
}

/// Spend per category, rounded to cents, in first-seen order.
pub fn category_totals(items: &[BomItem]) -> Vec<(BomCategory, Usd)> {
    let mut out: Vec<(BomCategory, Usd)> = Vec::new();
    for item in items {
        match out.iter_mut().find(|(c, _)| *c == item.category) {
            Some((_, t)) => *t = *t + item.extended(),
            None => out.push((item.category, item.extended())),
        }
    }
    out.into_iter().map(|(c, t)| (c, t.round_cents())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetCheck {
    pub passes: bool,
    pub headroom: Usd,
}

pub fn budget_check(total: Usd, budget: Usd) -> Result<BudgetCheck> {
    if budget.0 <= Decimal::ZERO {
        return Err(Error::Domain(format!("budget must be positive, got {budget}")));
    }
    Ok(BudgetCheck { passes: total <= budget, headroom: (budget - total).round_cents() })
}

/// Prototype cost marked up by `margin` (0.30 for thirty percent).
pub fn unit_price(prototype_cost: Usd, margin: Decimal) -> Result<Usd> {
    if margin.is_sign_negative() && !margin.is_zero() {
        return Err(Error::Domain(format!("margin must be non-negative, got {margin}")));
    }
    Ok(Usd(prototype_cost.0 * (Decimal::ONE + margin)).round_cents())
}

pub fn annual_revenue(unit_price: Usd, units_per_year: u32) -> Usd {
    Usd(unit_price.0 * Decimal::from(units_per_year)).round_cents()
}

/// Converts a floating margin such as `0.3` through its shortest decimal text.
pub fn margin_from_f64(margin: f64) -> Result<Decimal> {
    Decimal::from_str(&format!("{margin}")).map_err(|e| Error::Domain(format!("invalid margin {margin}: {e}")))
}

/// The reference desk-arm parts list.
pub fn desk_arm_bom() -> Bom {
    serde_json::from_str(include_str!("../fixtures/bom.json")).expect("bundled BOM parses")
}
