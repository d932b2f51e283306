//! Delimited ballot tables.
//!
//! ```text
//! pbvote-profile,format=kapp,k=5,election=small-a
//! voter,consistent,ballot
//! v001,1,sa01 sa03 sa07
//! v002,,sa02
//! ```
//!
//! The first row names the format and its parameters, the second is the
//! column header. Ballots are space-separated project ids; points ballots
//! use `id:points` tokens and rankings list ids from first to last. The
//! consistency column is optional per row (`1`/`0`, `true`/`false`, or empty).

use std::sync::Arc;

use super::{IoError, RowIssue};
use crate::model::{Ballot, BallotEntry, Format, FormatParams, Instance, Profile, ProfileError, ProjectId, VoterId};

pub const PROFILE_MAGIC: &str = "pbvote-profile";
const COLUMNS: [&str; 3] = ["voter", "consistent", "ballot"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileHeader {
    pub format: Format,
    pub params: FormatParams,
    pub election: Option<String>,
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn parse_header(record: &csv::StringRecord) -> Result<ProfileHeader, IoError> {
    let mut cells = record.iter();
    if cells.next() != Some(PROFILE_MAGIC) {
        return Err(IoError::Header(format!("expected `{PROFILE_MAGIC}` as the first cell")));
    }
    let (mut format, mut params, mut election) = (None, FormatParams::default(), None);
    for cell in cells.filter(|c| !c.is_empty()) {
        let (key, value) = cell.split_once('=').ok_or_else(|| IoError::Header(format!("expected key=value, got `{cell}`")))?;
        let number = || value.parse::<u32>().map_err(|_| IoError::Header(format!("`{key}` must be a non-negative integer, got `{value}`")));
        match key {
            "format" => format = Some(value.parse::<Format>().map_err(|e| IoError::Header(e.to_string()))?),
            "k" => params.k = Some(number()?),
            "t" => params.t = Some(number()?),
            "election" => election = Some(value.to_string()),
            _ => return Err(IoError::Header(format!("unknown key `{key}`"))),
        }
    }
    let format = format.ok_or_else(|| IoError::Header("missing format".into()))?;
    Ok(ProfileHeader { format, params, election })
}

/// Reads only the first row, e.g. to route a file to its instance.
pub fn read_profile_header(text: &str) -> Result<ProfileHeader, IoError> {
    let mut records = reader(text).into_records();
    let first = records.next().ok_or_else(|| IoError::Header("empty document".into()))??;
    parse_header(&first)
}

fn parse_flag(cell: &str) -> Result<Option<bool>, String> {
    match cell.to_ascii_lowercase().as_str() {
        "" => Ok(None),
        "1" | "true" | "yes" => Ok(Some(true)),
        "0" | "false" | "no" => Ok(Some(false)),
        other => Err(format!("consistency flag must be 1/0/true/false, got `{other}`")),
    }
}

fn parse_ballot(format: Format, cell: &str) -> Result<Ballot, String> {
    let tokens = cell.split_whitespace();
    if format == Format::Points {
        let alloc = tokens
            .map(|tok| {
                let (id, pts) = tok.split_once(':').ok_or_else(|| format!("points token `{tok}` is not id:points"))?;
                let pts = pts.parse::<u32>().map_err(|_| format!("points token `{tok}` has a bad amount"))?;
                Ok((ProjectId::new(id), pts))
            })
            .collect::<Result<Vec<_>, String>>()?;
        return Ok(Ballot::Points(alloc));
    }
    Ok(Ballot::from_ids(format, tokens.map(ProjectId::new).collect()).expect("non-points format"))
}

/// Parses and validates a ballot table against `instance`, reporting every bad row.
pub fn parse_profile(text: &str, instance: impl Into<Arc<Instance>>) -> Result<Profile, IoError> {
    let instance = instance.into();
    let mut records = reader(text).into_records();
    let header = parse_header(&records.next().ok_or_else(|| IoError::Header("empty document".into()))??)?;

    let mut issues = Vec::new();
    let mut entries = Vec::new();
    let mut lines = Vec::new();
    let mut saw_columns = false;
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !saw_columns {
            saw_columns = true;
            if record.iter().collect::<Vec<_>>() == COLUMNS {
                continue;
            }
            issues.push(RowIssue { line, voter: None, message: format!("expected column header `{}`", COLUMNS.join(",")) });
            continue;
        }
        if record.len() != COLUMNS.len() {
            issues.push(RowIssue { line, voter: record.get(0).map(str::to_string), message: format!("expected 3 cells, found {}", record.len()) });
            continue;
        }
        let voter = record[0].to_string();
        let parsed = parse_flag(&record[1]).and_then(|flag| Ok((flag, parse_ballot(header.format, &record[2])?)));
        match parsed {
            Ok((consistent, ballot)) => {
                entries.push(BallotEntry { voter: VoterId::new(voter), ballot, consistent });
                lines.push(line);
            }
            Err(message) => issues.push(RowIssue { line, voter: Some(voter), message }),
        }
    }
    let voters: Vec<VoterId> = entries.iter().map(|e| e.voter.clone()).collect();
    let validated = Profile::with_entries(instance, header.format, header.params, entries);
    let profile = match validated {
        Ok(profile) if issues.is_empty() => profile,
        Ok(_) => return Err(IoError::InvalidRows(issues)),
        Err(ProfileError::InvalidBallots(rows)) => {
            issues.extend(
                rows.into_iter()
                    .map(|r| RowIssue { line: lines[r.row], voter: Some(r.voter.to_string()), message: r.violation.to_string() }),
            );
            issues.sort_by_key(|r| r.line);
            return Err(IoError::InvalidRows(issues));
        }
        Err(ProfileError::DuplicateVoter(v)) => {
            let at = voters.iter().rposition(|x| x == &v).expect("duplicate voter is present");
            issues.push(RowIssue { line: lines[at], voter: Some(v.to_string()), message: "duplicate voter id".into() });
            issues.sort_by_key(|r| r.line);
            return Err(IoError::InvalidRows(issues));
        }
        Err(other) => return Err(IoError::Header(other.to_string())),
    };
    Ok(match header.election {
        Some(e) => profile.with_election(e),
        None => profile,
    })
}

pub fn serialize_profile(profile: &Profile) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    let mut head = vec![PROFILE_MAGIC.to_string(), format!("format={}", profile.format())];
    if let Some(k) = profile.params().k {
        head.push(format!("k={k}"));
    }
    if let Some(t) = profile.params().t {
        head.push(format!("t={t}"));
    }
    if let Some(e) = profile.election() {
        head.push(format!("election={e}"));
    }
    w.write_record(&head).expect("in-memory write");
    w.write_record(COLUMNS).expect("in-memory write");
    for e in profile.entries() {
        let flag = match e.consistent {
            Some(true) => "1",
            Some(false) => "0",
            None => "",
        };
        let payload = match &e.ballot {
            Ballot::Points(alloc) => alloc.iter().map(|(id, p)| format!("{id}:{p}")).collect::<Vec<_>>().join(" "),
            other => other.ids().expect("id ballot").iter().map(ProjectId::to_string).collect::<Vec<_>>().join(" "),
        };
        w.write_record([e.voter.as_str(), flag, &payload]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 output")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::fixtures::{self, Election};
    use proptest::prelude::*;

    fn small_a() -> Arc<Instance> {
        Arc::new(fixtures::instance(Election::SmallA))
    }

    #[test]
    fn parses_points_rows() {
        let text = "pbvote-profile,format=points,election=small-a\nvoter,consistent,ballot\nv1,1,sa01:60 sa02:40\nv2,0,sa10:100\n";
        let p = parse_profile(text, small_a()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.election(), Some("small-a"));
        assert_eq!(p.entries()[1].consistent, Some(false));
        assert_eq!(p.entries()[0].ballot, Ballot::Points(vec![("sa01".into(), 60), ("sa02".into(), 40)]));
    }

    #[test]
    fn empty_ballot_section_gives_empty_profile() {
        let p = parse_profile("pbvote-profile,format=rank\nvoter,consistent,ballot\n", small_a()).unwrap();
        assert!(p.is_empty());
        assert!(parse_profile("pbvote-profile,format=rank\n", small_a()).unwrap().is_empty());
    }

    #[test]
    fn knapsack_over_budget_names_row_and_cost() {
        let text = "pbvote-profile,format=knap\nvoter,consistent,ballot\nv1,,sa01\nv2,,sa05 sa07\n";
        let IoError::InvalidRows(rows) = parse_profile(text, small_a()).unwrap_err() else { panic!() };
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].line, 4);
        assert_eq!(rows[0].voter.as_deref(), Some("v2"));
        assert!(rows[0].message.contains("570000"));
    }

    #[test]
    fn rank_row_missing_a_project_is_not_a_permutation() {
        let text = "pbvote-profile,format=rank\nvoter,consistent,ballot\nv1,,sa01 sa02 sa03 sa04 sa05 sa06 sa07 sa08 sa09\n";
        let IoError::InvalidRows(rows) = parse_profile(text, small_a()).unwrap_err() else { panic!() };
        assert!(rows[0].message.contains("not a permutation"), "{}", rows[0].message);
    }

    #[test]
    fn row_errors_are_collected() {
        let text = "pbvote-profile,format=kapp,k=2\nvoter,consistent,ballot\nv1,maybe,sa01\nv2,,sa01 sa02 sa03\nv3,,sa01\nv4,,nope\n";
        let IoError::InvalidRows(rows) = parse_profile(text, small_a()).unwrap_err() else { panic!() };
        assert_eq!(rows.iter().map(|r| r.line).collect::<Vec<_>>(), vec![3, 4, 6]);
        let text = text.replace("maybe", "1");
        let IoError::InvalidRows(rows) = parse_profile(&text, small_a()).unwrap_err() else { panic!() };
        assert_eq!(rows.iter().map(|r| r.line).collect::<Vec<_>>(), vec![4, 6]);
    }

    #[test]
    fn duplicate_voter_row_is_located() {
        let text = "pbvote-profile,format=knap\nvoter,consistent,ballot\nv1,,sa01\nv1,,sa02\n";
        let IoError::InvalidRows(rows) = parse_profile(text, small_a()).unwrap_err() else { panic!() };
        assert_eq!(rows[0].line, 4);
    }

    #[test]
    fn header_problems() {
        assert!(matches!(parse_profile("voter,consistent,ballot\n", small_a()), Err(IoError::Header(_))));
        assert!(matches!(parse_profile("pbvote-profile,format=borda\n", small_a()), Err(IoError::Header(_))));
        assert!(matches!(parse_profile("pbvote-profile,format=kapp\n", small_a()), Err(IoError::Header(_))));
        assert_eq!(read_profile_header("pbvote-profile,format=tapp,t=3,election=x\n").unwrap().params, FormatParams::t(3));
    }

    fn arb_profile() -> impl Strategy<Value = Profile> {
        let inst = small_a();
        let ids: Vec<ProjectId> = inst.projects().iter().map(|p| p.id.clone()).collect();
        let ballot = prop_oneof![
            Just(Format::Rank),
            Just(Format::KApproval),
            Just(Format::ThresholdApproval),
            Just(Format::ValueForMoney)
        ];
        (ballot, prop::collection::vec((Just(ids.clone()).prop_shuffle(), 0usize..=5, prop::option::of(any::<bool>())), 0..8))
            .prop_map(move |(format, rows)| {
                let entries = rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, (order, k, consistent))| {
                        let ids = if format.is_ranking() { order } else { order[..k].to_vec() };
                        BallotEntry { voter: VoterId::new(format!("v{i}")), ballot: Ballot::from_ids(format, ids).unwrap(), consistent }
                    })
                    .collect();
                let params = FormatParams { k: Some(5), t: Some(2) };
                Profile::with_entries(inst.clone(), format, params, entries).unwrap().with_election("small-a")
            })
    }

    proptest! {
        #[test]
        fn round_trip(profile in arb_profile()) {
            let text = serialize_profile(&profile);
            prop_assert_eq!(parse_profile(&text, profile.shared_instance().clone()).unwrap(), profile);
        }
    }
}
