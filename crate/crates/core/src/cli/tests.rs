use super::*;

fn parse(args: &[&str]) -> std::result::Result<CliConfig, ParseError> {
    parse_args(std::iter::once("decaystream").chain(args.iter().copied()), None)
}

fn points(text: &str, format: Format) -> Result<Vec<Point>> {
    ingest(text.as_bytes(), format).collect()
}

#[test]
fn poly_args_parse() {
    match parse(&["poly", "--s", "1", "--epsilon", "0.3", "--k", "2", "--input", "pts.csv"]).unwrap() {
        CliConfig::Poly { config, input, output } => {
            assert_eq!(config.s, 1.0);
            assert_eq!(config.k, 2);
            assert_eq!(config.n_max, 1 << 30);
            assert_eq!(config.seed, 0);
            assert_eq!(input.format, Format::Csv);
            assert_eq!(input.path.as_deref(), Some(Path::new("pts.csv")));
            assert!(output.is_none());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn exp_defaults() {
    match parse(&["exp", "--h", "8", "--delta-aspect", "1024", "--k", "3"]).unwrap() {
        CliConfig::Exp { config, .. } => {
            assert_eq!((config.beta, config.gamma), (2.0, 10.0));
            assert_eq!(config.amplification, 5);
            assert_eq!(config.k, 3);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn exp_rejects_small_gamma_and_poly_flags() {
    assert!(matches!(parse(&["exp", "--h", "8", "--delta-aspect", "1024", "--k", "3", "--gamma", "5"]), Err(ParseError::Usage(_))));
    assert!(matches!(parse(&["exp", "--gamma", "5"]), Err(ParseError::Usage(_))));
    assert!(matches!(parse(&["exp", "--h", "8", "--delta-aspect", "16", "--k", "1", "--s", "1"]), Err(ParseError::Usage(_))));
    assert!(matches!(parse(&["exp", "--h", "8", "--delta-aspect", "16", "--k", "1", "--beta", "3"]), Err(ParseError::Usage(_))));
    assert!(matches!(parse(&["poly", "--s", "1", "--k", "1", "--bogus"]), Err(ParseError::Usage(_))));
}

#[test]
fn bench_rejects_mixed_params() {
    assert!(matches!(parse(&["bench", "--algo", "exp", "--k", "2", "--h", "4", "--delta-aspect", "64", "--s", "1"]), Err(ParseError::Usage(_))));
    assert!(matches!(parse(&["bench", "--algo", "poly", "--k", "2", "--s", "1", "--h", "4"]), Err(ParseError::Usage(_))));
    assert!(matches!(parse(&["bench", "--algo", "poly", "--k", "2"]), Err(ParseError::Usage(_))));
    match parse(&["bench", "--algo", "exp", "--k", "2", "--h", "4", "--delta-aspect", "64", "--seed", "7", "--runs", "2"]).unwrap() {
        CliConfig::Bench { experiment, .. } => assert_eq!(experiment.seeds, vec![7, 8]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn verify_needs_one_decay() {
    assert!(matches!(parse(&["verify", "--coreset", "c.jsonl", "--k", "1"]), Err(ParseError::Usage(_))));
    assert!(matches!(parse(&["verify", "--coreset", "c.jsonl", "--k", "1", "--s", "1", "--h", "2"]), Err(ParseError::Usage(_))));
    assert!(parse(&["verify", "--coreset", "c.jsonl", "--k", "1", "--h", "2"]).is_ok());
}

#[test]
fn env_seed_overrides_flag() {
    let argv = ["decaystream", "poly", "--s", "1", "--k", "1", "--seed", "3"];
    match parse_args(argv, Some("42")).unwrap() {
        CliConfig::Poly { config, .. } => assert_eq!(config.seed, 42),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_args(argv, Some("x")), Err(ParseError::Usage(_))));
}

#[test]
fn help_is_not_an_error() {
    assert!(matches!(parse(&["--help"]), Err(ParseError::Help(_))));
}

#[test]
fn format_inferred_from_extension() {
    match parse(&["poly", "--s", "1", "--k", "1", "--input", "a.jsonl"]).unwrap() {
        CliConfig::Poly { input, .. } => assert_eq!(input.format, Format::Jsonl),
        other => panic!("{other:?}"),
    }
    match parse(&["poly", "--s", "1", "--k", "1", "--input", "-"]).unwrap() {
        CliConfig::Poly { input, .. } => assert!(input.path.is_none()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn csv_rows() {
    let pts = points("0.0,1.0\n2.0,3.0", Format::Csv).unwrap();
    assert_eq!(pts, vec![Point::from(vec![0.0, 1.0]), Point::from(vec![2.0, 3.0])]);
    assert_eq!(points(" 1 , 2 \n\n3,4\n", Format::Csv).unwrap().len(), 2);
}

#[test]
fn jsonl_rows() {
    assert_eq!(points("{\"coords\":[1.5]}", Format::Jsonl).unwrap(), vec![Point::from(vec![1.5])]);
}

#[test]
fn empty_input_is_empty_stream() {
    assert!(points("", Format::Csv).unwrap().is_empty());
    assert!(points("", Format::Jsonl).unwrap().is_empty());
}

#[test]
fn malformed_rows_name_their_line() {
    match points("1,2\n3,x\n", Format::Csv) {
        Err(Error::Parse { line: 2, .. }) => {}
        other => panic!("{other:?}"),
    }
    match points("{\"coords\":[1]}\n\nnot json\n", Format::Jsonl) {
        Err(Error::Parse { line: 3, .. }) => {}
        other => panic!("{other:?}"),
    }
    match points("1,2\n3,4,5\n", Format::Csv) {
        Err(Error::Parse { line: 2, message }) => assert!(message.contains("dimension")),
        other => panic!("{other:?}"),
    }
    match points("1,2\nnan,4\n", Format::Csv) {
        Err(Error::Parse { line: 2, .. }) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn ingest_stops_after_error() {
    let mut it = ingest("1\nx\n2\n".as_bytes(), Format::Csv);
    assert!(it.next().unwrap().is_ok());
    assert!(it.next().unwrap().is_err());
    assert!(it.next().is_none());
}

#[test]
fn single_point_coreset_line() {
    let mut sketch = PolyDecaySketch::new(PolyConfig::new(1.0, 0.3, 1)).unwrap();
    sketch.insert(Point::from(vec![2.5, -1.0])).unwrap();
    let mut buf = Vec::new();
    assert_eq!(emit_result(Outcome::Coreset(&sketch.query()), &mut buf).unwrap(), EXIT_OK);
    assert_eq!(String::from_utf8(buf).unwrap(), "{\"coords\":[2.5,-1.0],\"weight\":1.0}\n");
}

#[test]
fn coreset_round_trip() {
    let entries: Vec<WeightedPoint> = (0..50)
        .map(|i| {
            let x = (i as f64 * 0.7316).sin() * 1e3 / 3.0;
            WeightedPoint::new(Point::from(vec![x, 1.0 / (i as f64 + 3.0)]), 1.0 / (i as f64 + 1.0).powf(1.37), i + 1)
        })
        .collect();
    let coreset = Coreset { entries: entries.clone(), epsilon: 0.3, source_size: 50 };
    let mut buf = Vec::new();
    emit_result(Outcome::Coreset(&coreset), &mut buf).unwrap();
    let back = read_weighted(buf.as_slice()).unwrap();
    assert_eq!(back.len(), entries.len());
    for (a, b) in back.iter().zip(&entries) {
        assert!((a.weight - b.weight).abs() <= 1e-12);
        for (x, y) in a.point.coords.iter().zip(&b.point.coords) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
}

#[test]
fn read_weighted_rejects_negative_weight() {
    assert!(matches!(read_weighted("{\"coords\":[1],\"weight\":-1}".as_bytes()), Err(Error::Parse { line: 1, .. })));
    assert_eq!(read_weighted("{\"coords\":[1]}".as_bytes()).unwrap()[0].weight, 1.0);
}

#[test]
fn verify_exit_codes() {
    let pts = vec![Point::from(vec![0.0]), Point::from(vec![4.0])];
    let reference = vec![WeightedPoint::new(pts[0].clone(), 1.0, 1), WeightedPoint::new(pts[1].clone(), 1.0, 2)];
    let grid = QueryGrid::all_subsets(&pts, 1).unwrap();
    let ok = verify_coreset(&reference, &reference, CostFunction::KMedian, &grid, 0.1).unwrap();
    assert_eq!(emit_result(Outcome::Verify { report: &ok, epsilon: 0.1, grid: &grid }, Vec::new()).unwrap(), EXIT_OK);
    let mut bad = reference.clone();
    bad[0].weight = 2.0;
    let fail = verify_coreset(&bad, &reference, CostFunction::KMedian, &grid, 0.1).unwrap();
    let mut buf = Vec::new();
    assert_eq!(emit_result(Outcome::Verify { report: &fail, epsilon: 0.1, grid: &grid }, &mut buf).unwrap(), EXIT_VERIFY_FAILED);
    assert!(String::from_utf8(buf).unwrap().contains("\"max_rel_error\":1.0"));
}
