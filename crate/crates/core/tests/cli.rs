use std::io::Write;
use std::process::{Command, Stdio};

fn nambu(args: &[&str], doc: &str) -> (String, String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nambu"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(doc.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap(),
    )
}

const QUAD: &str = "vars n=5 cap=3;
form w = (1/2*x2^2 + 1/2*x3^2 + 3*x1*x4 + 3*x1^2)*dx1 + 2*x1*x2*dx2 + 2*x1*x3*dx3 + 2*x1^2*dx4;
";

#[test]
fn two_variable_forms_are_integrable() {
    let (out, _, code) = nambu(
        &["check-integrable", "w"],
        "vars n=2 cap=5; form w = x2^3*dx1 - (x1 + x1*x2)*dx2;",
    );
    assert_eq!(code, 0, "{}", out);
}

#[test]
fn classify_quadratic_normal_form() {
    let (out, err, code) = nambu(&["--json", "classify-quadratic", "w"], QUAD);
    assert_eq!(code, 0, "{}{}", out, err);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["tag"], "Type1");
    assert_eq!(v["report"]["data"]["theta"], "1");
    assert_eq!(v["report"]["data"]["beta"], "2");
    assert_eq!(v["report"]["data"]["gamma"], "3");
    assert_eq!(v["report"]["certificate"]["holds"], true);
}

#[test]
fn normal_form_names_the_modular_hypothesis() {
    let (out, err, code) = nambu(
        &["normal-form", "L"],
        "vars n=3 cap=4; mv L = (x2 + x3)*@1^@2;",
    );
    assert_eq!(code, 2, "{}", out);
    assert!(
        err.contains("modular tensor vanishes at the origin"),
        "{}",
        err
    );
    let (out, _, code) = nambu(
        &["--json", "normal-form", "L"],
        "vars n=3 cap=4; mv L = (x2 + x3)*@1^@2;",
    );
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "precondition");
}

#[test]
fn exit_codes() {
    let doc = "vars n=3 cap=4; form w = x2*dx1 + x1*x3*dx2; mv L = x3*@1^@2;";
    assert_eq!(nambu(&["check-integrable", "w"], doc).2, 1);
    assert_eq!(nambu(&["check-nambu", "L"], doc).2, 0);
    assert_eq!(nambu(&["check-integrable", "nope"], doc).2, 2);
    assert_eq!(nambu(&["check-integrable", "L"], doc).2, 2);
    assert_eq!(nambu(&["no-such-command"], doc).2, 2);
    assert_eq!(nambu(&["--help"], doc).2, 0);
    let (_, err, code) = nambu(&["print"], "vars n=3 cap=4;\nform w = dx4;");
    assert_eq!(code, 2);
    assert!(err.contains("2:10: index out of range"), "{}", err);
}

#[test]
fn json_is_stable() {
    let a = nambu(&["--json", "classify-quadratic", "w"], QUAD);
    let b = nambu(&["--json", "classify-quadratic", "w"], QUAD);
    assert_eq!(a, b);
    // keys are sorted at every level
    fn sorted(v: &serde_json::Value) -> bool {
        match v {
            serde_json::Value::Object(m) => {
                let keys: Vec<&String> = m.keys().collect();
                keys.windows(2).all(|w| w[0] < w[1]) && m.values().all(sorted)
            }
            serde_json::Value::Array(a) => a.iter().all(sorted),
            _ => true,
        }
    }
    let text = &a.0;
    let pos: Vec<usize> = ["\"command\"", "\"exit_code\"", "\"ok\"", "\"report\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert!(sorted(&serde_json::from_str(text).unwrap()));
}

#[test]
fn pipeline_commands() {
    let doc = "vars n=3 cap=5;
mv L = x3*@1^@2 + x2*@1^@3;
poly f = x1;
poly g = x2;
form r = x3*dx3 + (x1 + x1*x3)*dx1;
form w2 = x2*dx2 + x1*dx1;
poly h = x1 + x2^2;
mv X = @1;
mv Y = @3;
";
    assert_eq!(nambu(&["hamiltonian", "L", "--funcs", "f"], doc).2, 0);
    assert_eq!(nambu(&["modular", "L"], doc).2, 0);
    assert_eq!(nambu(&["modular-props", "L"], doc).2, 0);
    assert_eq!(nambu(&["fi-check", "L", "--deg", "1"], doc).2, 0);
    assert_eq!(nambu(&["classify-linear", "L"], doc).2, 0);
    let (out, err, code) = nambu(&["reduce-p", "r", "--p", "1"], doc);
    assert_eq!(code, 0, "{}{}", out, err);
    assert_eq!(nambu(&["type2r", "L", "--fields", "X"], doc).2, 0);
    assert_eq!(nambu(&["type2r", "L", "--fields", "Y"], doc).2, 1);
    assert_eq!(
        nambu(
            &[
                "verify-pullback",
                "w2",
                "--h",
                "f",
                "--target",
                "w2",
                "--unit",
                "1"
            ],
            doc
        )
        .2,
        1
    );
}
