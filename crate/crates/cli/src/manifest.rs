//! Run manifest: the resolved scenario as dotted `key = value` lines.
//!
//! The lines are valid TOML, so a manifest can be passed back as `--config`.

use anyhow::Result;
use toml::{Table, Value};

use crate::scenario::Scenario;

/// Renders `scenario` followed by `notes` as comment lines.
pub fn render(scenario: &Scenario, notes: &[String]) -> Result<String> {
    let table = Table::try_from(scenario)?;
    let mut out = String::from("# rgdc run manifest\n");
    flatten("", &table, &mut out);
    for n in notes {
        out.push_str("# ");
        out.push_str(n);
        out.push('\n');
    }
    Ok(out)
}

fn flatten(prefix: &str, table: &Table, out: &mut String) {
    // Scalars first so each table's own keys stay together.
    let (tables, values): (Vec<_>, Vec<_>) = table
        .iter()
        .partition(|(_, v)| matches!(v, Value::Table(_)));
    for (key, value) in values {
        out.push_str(&format!("{prefix}{key} = {value}\n"));
    }
    for (key, value) in tables {
        if let Value::Table(t) = value {
            flatten(&format!("{prefix}{key}."), t, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_parses_back_to_the_same_scenario() {
        let s = Scenario::parse(
            r#"
name = "multi"
experiment = "multistep"
epsilon = 0.0001
seed = 3

[system]
kind = "discrete"
a = [[0.5, 0.1], [0.0, 0.25]]
b = [0.5, 0.75]
c_tr = [1.0, 0.0]
ts = 0.01

[reference]
kind = "steps"
steps = [[0.0, 1.0], [0.3, -0.7]]

[uncertainty]
g_vco = [160.0, 240.0]
"#,
        )
        .unwrap();
        let text = render(&s, &["note".into()]).unwrap();
        assert!(text
            .lines()
            .all(|l| l.starts_with('#') || l.contains(" = ")));
        assert!(text.contains("system.kind = \"discrete\"\n"));
        assert!(text.contains("epsilon = 0.0001\n"));
        assert_eq!(Scenario::parse(&text).unwrap(), s);
    }
}
