use std::io::Write;

use serde_json::{json, Value};

use super::Trajectory;
use crate::numfmt::g17;
use crate::Result;

/// Writes trajectories as CSV with columns `traj,t,x1..xn,phase,event`.
///
/// Rows are grouped per trajectory in input order. Each crossing appears
/// once, as a row with phase `interface` and `event = 1`. Numbers use the
/// C `%.17g` format.
pub fn write_csv<W: Write>(out: &mut W, trajectories: &[Trajectory]) -> Result<()> {
    let dim = trajectories.first().map_or(0, |t| t.dim);
    let mut header = String::from("traj,t");
    for k in 1..=dim {
        header.push_str(&format!(",x{k}"));
    }
    header.push_str(",phase,event\n");
    out.write_all(header.as_bytes())?;
    for (id, traj) in trajectories.iter().enumerate() {
        let last = traj.segments.len().saturating_sub(1);
        for (j, seg) in traj.segments.iter().enumerate() {
            for (i, (t, x)) in seg.times.iter().zip(&seg.states).enumerate() {
                let junction_end = j < last && i + 1 == seg.len();
                if junction_end {
                    continue;
                }
                let is_event = j > 0 && i == 0;
                let mut row = format!("{id},{}", g17(*t));
                for v in x.iter() {
                    row.push(',');
                    row.push_str(&g17(*v));
                }
                let phase = if is_event { "interface" } else { seg.phase.as_str() };
                row.push_str(&format!(",{phase},{}\n", u8::from(is_event)));
                out.write_all(row.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// JSON document with segments, events (relative normal speeds, signs,
/// continuation mode) and diagnostics.
pub fn trajectory_json(traj: &Trajectory) -> Value {
    let segments: Vec<Value> = traj
        .segments
        .iter()
        .map(|s| {
            json!({
                "phase": s.phase.as_str(),
                "t_start": s.start_time(),
                "t_end": s.end_time(),
                "times": s.times,
                "states": s.states.iter().map(|x| x.as_slice().to_vec()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let events: Vec<Value> = traj
        .events
        .iter()
        .map(|e| {
            json!({
                "time": e.time,
                "location": e.location.as_slice(),
                "from_phase": e.from_phase.as_str(),
                "to_phase": e.to_phase.as_str(),
                "u_plus": e.u_plus,
                "u_minus": e.u_minus,
                "sign": e.sign,
                "mode": e.mode,
            })
        })
        .collect();
    json!({
        "dim": traj.dim,
        "backward": traj.backward,
        "t_start": traj.start_time(),
        "t_end": traj.end_time(),
        "final_state": traj.final_state().as_slice(),
        "segments": segments,
        "events": events,
        "diagnostics": traj.diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{trace, IntegratorConfig};
    use crate::scenes::builtin;
    use crate::vector;

    #[test]
    fn csv_has_one_event_row() {
        let s1 = builtin("S1").unwrap();
        let traj = trace(&s1, &IntegratorConfig::rk4(0.25), 0.0, &vector(&[0.0, -1.0]), 2.0).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &[traj]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "traj,t,x1,x2,phase,event");
        let events: Vec<&&str> = lines.iter().filter(|l| l.ends_with(",1")).collect();
        assert_eq!(events.len(), 1);
        assert!(events[0].contains(",interface,"));
        // 0, .25, ..., 1.25 (event), 1.5, 1.75, 2
        assert_eq!(lines.len(), 1 + 9);
        assert_eq!(lines[1], "0,0,0,-1,minus,0");
        assert!(lines.last().unwrap().ends_with(",plus,0"));
    }

    #[test]
    fn json_lists_events() {
        let s1 = builtin("S1").unwrap();
        let traj = trace(&s1, &IntegratorConfig::rk4(0.25), 0.0, &vector(&[0.0, -1.0]), 2.0).unwrap();
        let v = trajectory_json(&traj);
        assert_eq!(v["events"][0]["mode"], "cross");
        assert_eq!(v["events"][0]["sign"], 1);
        assert_eq!(v["segments"].as_array().unwrap().len(), 2);
    }
}
