use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};

const BUILTIN_TABLE: &str = include_str!("../../data/champion_roles.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Assassin,
    Fighter,
    Mage,
    Marksman,
    Support,
    Tank,
}

impl Role {
    /// Column order of the lookup table.
    pub const TABLE_ORDER: [Role; 6] = [
        Role::Assassin,
        Role::Fighter,
        Role::Mage,
        Role::Marksman,
        Role::Support,
        Role::Tank,
    ];
}

/// Multi-hot role membership in table order (assassin, fighter, mage, marksman, support, tank).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoleVector(pub [u8; 6]);

impl RoleVector {
    pub fn has(&self, role: Role) -> bool {
        self.0[role as usize] == 1
    }
}

/// Champion name to role lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChampionRoleTable {
    rows: BTreeMap<String, RoleVector>,
}

impl ChampionRoleTable {
    /// The table shipped with the crate: the documented real champions plus
    /// the synthetic pool used by the generator.
    pub fn builtin() -> Self {
        Self::from_csv(BUILTIN_TABLE.as_bytes()).expect("bundled champion table is valid")
    }

    /// Reads `champion,assassin,fighter,mage,marksman,support,tank` with 0/1 cells.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = csv
            .headers()
            .map_err(|e| Error::RoleTable(e.to_string()))?
            .iter()
            .map(str::to_ascii_lowercase)
            .collect::<Vec<_>>();
        let expected = ["champion", "assassin", "fighter", "mage", "marksman", "support", "tank"];
        if header != expected {
            return Err(Error::RoleTable(format!(
                "expected header {}, got {}",
                expected.join(","),
                header.join(",")
            )));
        }
        let mut rows = BTreeMap::new();
        for (line, record) in csv.records().enumerate() {
            let record = record.map_err(|e| Error::RoleTable(e.to_string()))?;
            let name = record[0].to_string();
            let mut bits = [0u8; 6];
            for (k, bit) in bits.iter_mut().enumerate() {
                *bit = match &record[k + 1] {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(Error::RoleTable(format!(
                            "row {} ({name}): cell {:?} is not 0 or 1",
                            line + 2,
                            other
                        )))
                    }
                };
            }
            if bits.iter().all(|&b| b == 0) {
                return Err(Error::RoleTable(format!("{name} has no role")));
            }
            if rows.insert(name.clone(), RoleVector(bits)).is_some() {
                return Err(Error::RoleTable(format!("{name} listed twice")));
            }
        }
        Ok(Self { rows })
    }

    pub fn lookup_roles(&self, champion: &str) -> Result<RoleVector> {
        self.rows
            .get(champion)
            .copied()
            .ok_or_else(|| Error::UnknownChampion(champion.to_string()))
    }

    pub fn champions(&self) -> impl Iterator<Item = (&str, RoleVector)> {
        self.rows.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("champion,assassin,fighter,mage,marksman,support,tank\n");
        for (name, roles) in &self.rows {
            out.push_str(name);
            for bit in roles.0 {
                out.push(',');
                out.push(if bit == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_rows() {
        let table = ChampionRoleTable::builtin();
        assert_eq!(table.lookup_roles("Annie").unwrap(), RoleVector([0, 0, 1, 0, 0, 0]));
        assert_eq!(table.lookup_roles("Kayle").unwrap(), RoleVector([0, 1, 0, 0, 1, 0]));
        assert_eq!(table.lookup_roles("Shyvana").unwrap(), RoleVector([0, 1, 0, 0, 0, 1]));
        assert_eq!(table.lookup_roles("Vayne").unwrap(), RoleVector([1, 0, 0, 1, 0, 0]));
    }

    #[test]
    fn unknown_champion_is_named() {
        let err = ChampionRoleTable::builtin().lookup_roles("Foo").unwrap_err();
        assert!(err.to_string().contains("Foo"));
    }

    #[test]
    fn rejects_roleless_rows() {
        let csv = "champion,assassin,fighter,mage,marksman,support,tank\nNobody,0,0,0,0,0,0\n";
        assert!(ChampionRoleTable::from_csv(csv.as_bytes()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let table = ChampionRoleTable::builtin();
        let again = ChampionRoleTable::from_csv(table.to_csv().as_bytes()).unwrap();
        assert_eq!(table, again);
    }
}
