use crate::HarnessError;

/// Column layout of each experiment's table.
pub fn schema(experiment: &str) -> Option<&'static str> {
    match experiment {
        "rsw-curve" => Some("n,env_seeds,failures,p_fail,ci_low,ci_high,c"),
        "couple" => Some("delta,run,seed,stage,attempts,isolation,agreement_radius"),
        "dimer-moments" => Some("phi,mesh,ensemble,mean,variance,std_err,independent_centring,gff_target,ratio"),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub header: String,
    /// Comma-joined fields, without the hash column.
    pub rows: Vec<String>,
    pub manifest_hash: String,
}

impl ResultTable {
    pub fn new(experiment: &str, manifest_hash: String) -> Result<Self, HarnessError> {
        let header = schema(experiment).ok_or_else(|| HarnessError::Config(format!("no schema for {experiment:?}")))?;
        Ok(ResultTable { experiment: experiment.into(), header: header.into(), rows: Vec::new(), manifest_hash })
    }

    /// Header matches the registered schema and every row has one field per column.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if schema(&self.experiment) != Some(self.header.as_str()) {
            return Err(HarnessError::Runtime(format!(
                "header of {} table does not match its schema",
                self.experiment
            )));
        }
        let cols = self.header.split(',').count();
        for (i, row) in self.rows.iter().enumerate() {
            let got = row.split(',').count();
            if got != cols {
                return Err(HarnessError::Runtime(format!("row {i} has {got} fields, expected {cols}")));
            }
        }
        if self.manifest_hash.len() != 64 || !self.manifest_hash.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(HarnessError::Runtime("malformed manifest hash".into()));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},manifest_hash\n", self.header);
        for row in &self.rows {
            out.push_str(row);
            out.push(',');
            out.push_str(&self.manifest_hash);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: &str = "0123456789abcdef0123456789abcdef0123456789abcdef0123456789abcdef";

    #[test]
    fn rows_must_fit_the_schema() {
        let mut t = ResultTable::new("couple", H.into()).unwrap();
        t.rows.push("0.0625,0,1,Success,1,0,0.045".into());
        t.validate().unwrap();
        t.rows.push("0.0625,1".into());
        assert!(t.validate().is_err());
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = ResultTable::new("rsw-curve", H.into()).unwrap();
        t.validate().unwrap();
        assert_eq!(t.to_csv(), "n,env_seeds,failures,p_fail,ci_low,ci_high,c,manifest_hash\n");
        assert!(ResultTable::new("nope", H.into()).is_err());
    }
}
