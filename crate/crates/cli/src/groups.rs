use conductor_core::group::GroupSpec;

/// Reads a group descriptor: JSON (`{"kind": "affine", "p": 5}`) or the
/// call form (`affine(5)`, `elementary_abelian(3,2)`, `quaternion8`,
/// `direct_product(cyclic(2),dihedral(3))`).
pub fn parse_group(s: &str) -> Result<GroupSpec, String> {
    let s = s.trim();
    if s.starts_with('{') {
        return serde_json::from_str(s).map_err(|e| format!("group descriptor: {e}"));
    }
    let mut p = Parser { s, pos: 0 };
    let g = p.spec()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(format!("unexpected `{}` after group descriptor", &s[p.pos..]));
    }
    Ok(g)
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected `{c}` at offset {}", self.pos))
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.s[start..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        self.pos += len;
        &self.s[start..start + len]
    }

    fn number<T: std::str::FromStr>(&mut self) -> Result<T, String> {
        let at = self.pos;
        let w = self.word().to_string();
        w.parse().map_err(|_| format!("expected a number at offset {at}, found `{w}`"))
    }

    fn args1<T: std::str::FromStr>(&mut self) -> Result<T, String> {
        self.expect('(')?;
        let n = self.number()?;
        self.expect(')')?;
        Ok(n)
    }

    fn spec(&mut self) -> Result<GroupSpec, String> {
        let name = self.word().to_ascii_lowercase();
        Ok(match name.as_str() {
            "cyclic" => GroupSpec::Cyclic { n: self.args1()? },
            "dihedral" => GroupSpec::Dihedral { n: self.args1()? },
            "heisenberg" => GroupSpec::Heisenberg { p: self.args1()? },
            "affine" => GroupSpec::Affine { p: self.args1()? },
            "quaternion8" | "q8" => {
                if self.eat('(') {
                    self.expect(')')?;
                }
                GroupSpec::Quaternion8
            }
            "elementary_abelian" => {
                self.expect('(')?;
                let p = self.number()?;
                self.expect(',')?;
                let k = self.number()?;
                self.expect(')')?;
                GroupSpec::ElementaryAbelian { p, k }
            }
            "direct_product" => {
                self.expect('(')?;
                let mut factors = vec![self.spec()?];
                while self.eat(',') {
                    factors.push(self.spec()?);
                }
                self.expect(')')?;
                GroupSpec::DirectProduct { factors }
            }
            "" => return Err(format!("expected a group name at offset {}", self.pos)),
            other => return Err(format!("unknown group `{other}`")),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn call_form_and_json_agree() {
        assert_eq!(parse_group("affine(5)").unwrap(), GroupSpec::Affine { p: 5 });
        assert_eq!(
            parse_group(" elementary_abelian( 3 , 2 ) ").unwrap(),
            GroupSpec::ElementaryAbelian { p: 3, k: 2 }
        );
        assert_eq!(parse_group("quaternion8").unwrap(), GroupSpec::Quaternion8);
        assert_eq!(
            parse_group("direct_product(cyclic(2),dihedral(3))").unwrap(),
            parse_group(r#"{"kind": "direct_product", "factors": [{"kind": "cyclic", "n": 2}, {"kind": "dihedral", "n": 3}]}"#)
                .unwrap()
        );
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_group("cyclic(x)").is_err());
        assert!(parse_group("cyclic(4").is_err());
        assert!(parse_group("torus(2)").is_err());
        assert!(parse_group("cyclic(4) extra").is_err());
        assert!(parse_group(r#"{"kind": "cyclic"}"#).is_err());
    }
}
