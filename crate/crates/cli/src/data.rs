//! Set data files: CSV with header `set_id,label,f1,...,fp`, one row per
//! observation. Rows sharing a `set_id` form one set; sets keep the order of
//! their first row. An empty label marks an unlabelled set.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use setclass::linalg::DenseVector;
use setclass::model::{ClassLabel, LabeledSet, SetSample};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    pub set_id: String,
    pub label: Option<ClassLabel>,
    pub sample: SetSample,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetData {
    pub dimension: usize,
    pub sets: Vec<DataSet>,
}

impl SetData {
    /// All sets with their labels; fails if any set is unlabelled.
    pub fn labeled(&self) -> CliResult<Vec<LabeledSet>> {
        self.sets
            .iter()
            .map(|s| match s.label {
                Some(label) => Ok(LabeledSet::new(s.sample.clone(), label)),
                None => Err(CliError::input(format!("set {:?} has no label", s.set_id))),
            })
            .collect()
    }

    pub fn from_labeled(sets: &[LabeledSet]) -> Self {
        let dimension = sets.first().map_or(0, |s| s.sample.dim());
        SetData {
            dimension,
            sets: sets
                .iter()
                .enumerate()
                .map(|(i, s)| DataSet {
                    set_id: format!("s{}", i + 1),
                    label: Some(s.label),
                    sample: s.sample.clone(),
                })
                .collect(),
        }
    }
}

fn parse_label(field: &str, line: u64) -> CliResult<Option<ClassLabel>> {
    match field.trim() {
        "" => Ok(None),
        "1" => Ok(Some(ClassLabel::One)),
        "2" => Ok(Some(ClassLabel::Two)),
        other => Err(CliError::input(format!(
            "line {line}: label must be 1, 2 or empty, got {other:?}"
        ))),
    }
}

pub fn read_set_data(path: &Path) -> CliResult<SetData> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    parse_set_data(file, &path.display().to_string())
}

pub fn parse_set_data<R: std::io::Read>(reader: R, name: &str) -> CliResult<SetData> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let bad = |msg: String| CliError::input(format!("{name}: {msg}"));
    let header = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.len() < 3 || &header[0] != "set_id" || &header[1] != "label" {
        return Err(bad("header must be set_id,label,f1,...,fp".into()));
    }
    for (k, h) in header.iter().skip(2).enumerate() {
        if h != format!("f{}", k + 1) {
            return Err(bad(format!("feature column {} must be named f{}, got {h:?}", k + 1, k + 1)));
        }
    }
    let p = header.len() - 2;

    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, (Option<ClassLabel>, Vec<DenseVector>)> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != p + 2 {
            return Err(bad(format!("line {line}: expected {} fields, found {}", p + 2, record.len())));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(bad(format!("line {line}: empty set_id")));
        }
        let label = parse_label(&record[1], line).map_err(|e| bad(e.to_string()))?;
        let mut x = DenseVector::zeros(p);
        for k in 0..p {
            let field = record[k + 2].trim();
            let v: f64 = field
                .parse()
                .map_err(|_| bad(format!("line {line}: feature f{} is not a number: {field:?}", k + 1)))?;
            if !v.is_finite() {
                return Err(bad(format!("line {line}: feature f{} is not finite", k + 1)));
            }
            x[k] = v;
        }
        match groups.get_mut(&id) {
            Some((existing, obs)) => {
                if *existing != label {
                    return Err(bad(format!("line {line}: set {id:?} has conflicting labels")));
                }
                obs.push(x);
            }
            None => {
                order.push(id.clone());
                groups.insert(id, (label, vec![x]));
            }
        }
    }
    if order.is_empty() {
        return Err(bad("no observations".into()));
    }
    let sets = order
        .into_iter()
        .map(|id| {
            let (label, obs) = groups.remove(&id).expect("every id was inserted");
            let sample = SetSample::new(obs).map_err(|e| bad(format!("set {id:?}: {e}")))?;
            Ok(DataSet {
                set_id: id,
                label,
                sample,
            })
        })
        .collect::<CliResult<_>>()?;
    Ok(SetData { dimension: p, sets })
}

pub fn write_set_data<W: Write>(data: &SetData, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["set_id".to_string(), "label".to_string()];
    header.extend((1..=data.dimension).map(|k| format!("f{k}")));
    w.write_record(&header).map_err(csv_err)?;
    for set in &data.sets {
        let label = set.label.map_or(String::new(), |l| l.to_string());
        for x in set.sample.observations() {
            let mut row = vec![set.set_id.clone(), label.clone()];
            row.extend(x.iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> CliError {
    CliError::input(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_by_first_appearance() {
        let text = "set_id,label,f1,f2\nb,2,1,2\na,1,0,0\nb,2,3,4\nc,,5,6\n";
        let data = parse_set_data(text.as_bytes(), "t").unwrap();
        assert_eq!(data.dimension, 2);
        let ids: Vec<&str> = data.sets.iter().map(|s| s.set_id.as_str()).collect();
        assert_eq!(ids, ["b", "a", "c"]);
        assert_eq!(data.sets[0].sample.size(), 2);
        assert_eq!(data.sets[2].label, None);
        assert!(data.labeled().is_err());
    }

    #[test]
    fn rejects_malformed() {
        for text in [
            "id,label,f1\na,1,0\n",
            "set_id,label,f1\na,3,0\n",
            "set_id,label,f1\na,1,x\n",
            "set_id,label,f1\na,1,0\na,2,1\n",
            "set_id,label,f1,f2\na,1,0\n",
            "set_id,label,f1\n",
            "set_id,label,g1\na,1,0\n",
        ] {
            assert!(matches!(parse_set_data(text.as_bytes(), "t"), Err(CliError::Input(_))), "{text}");
        }
    }

    #[test]
    fn write_then_read() {
        let text = "set_id,label,f1,f2\nb,2,1.5,-2\nb,2,3,4\nc,,0.1,6\n";
        let data = parse_set_data(text.as_bytes(), "t").unwrap();
        let mut buf = Vec::new();
        write_set_data(&data, &mut buf).unwrap();
        assert_eq!(parse_set_data(&buf[..], "t").unwrap(), data);
    }
}
