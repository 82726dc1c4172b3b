//! Minimum-phase Daubechies scaling filters, normalized so that `Σ h_k = √2`.

use crate::error::{LabError, Result};

const DB1: [f64; 2] = [0.7071067811865475244008, 0.7071067811865475244008];

const DB2: [f64; 4] = [
    0.4829629131445341433749,
    0.8365163037378079055753,
    0.224143868042013381026,
    -0.1294095225512603811744,
];

const DB3: [f64; 6] = [
    0.3326705529500826159985,
    0.8068915093110925764945,
    0.4598775021184915700952,
    -0.1350110200102545886964,
    -0.08544127388202666169282,
    0.03522629188570953660274,
];

const DB4: [f64; 8] = [
    0.2303778133088965008633,
    0.7148465705529156470899,
    0.6308807679298589078817,
    -0.02798376941685985421141,
    -0.1870348117190930840796,
    0.03084138183556076362722,
    0.03288301166688519973541,
    -0.01059740178506903210488,
];

const DB5: [f64; 10] = [
    0.1601023979741929144807,
    0.6038292697971896705401,
    0.7243085284377729277281,
    0.1384281459013207315054,
    -0.2422948870663820318626,
    -0.03224486958463837464848,
    0.07757149384004571352313,
    -0.006241490212798274274191,
    -0.01258075199908199946851,
    0.003335725285473771277998,
];

const DB6: [f64; 12] = [
    0.1115407433501094636213,
    0.4946238903984530856772,
    0.7511339080210953506789,
    0.315250351709197629086,
    -0.2262646939654398200763,
    -0.1297668675672619355623,
    0.09750160558732304910234,
    0.02752286553030572862554,
    -0.03158203931748602956508,
    0.0005538422011614961392519,
    0.004777257510945510639636,
    -0.001077301085308479564853,
];

const DB7: [f64; 14] = [
    0.07785205408500917901996,
    0.396539319481917306539,
    0.7291320908462351199169,
    0.4697822874051931224716,
    -0.1439060039285649754051,
    -0.2240361849938749826381,
    0.07130921926683026475088,
    0.08061260915108307191292,
    -0.03802993693501441357959,
    -0.01657454163066688065411,
    0.01255099855609984061299,
    0.0004295779729213665211321,
    -0.001801640704047490915268,
    0.0003537137999745202484463,
];

const DB8: [f64; 16] = [
    0.05441584224310400995501,
    0.3128715909142999706592,
    0.6756307362972898068078,
    0.5853546836542067127713,
    -0.01582910525634930566738,
    -0.2840155429615469265162,
    0.0004724845739132827703606,
    0.128747426620478458857,
    -0.01736930100180754616962,
    -0.04408825393079475150676,
    0.01398102791739828164872,
    0.008746094047405776716383,
    -0.004870352993451574310422,
    -0.0003917403733769470462981,
    0.0006754494064505693663695,
    -0.0001174767841247695337306,
];

const DB9: [f64; 18] = [
    0.0380779473638783465887,
    0.243834674612590353732,
    0.6048231236901111119031,
    0.6572880780513005380782,
    0.133197385825007576191,
    -0.2932737832791749088064,
    -0.09684078322297646051351,
    0.1485407493381063801351,
    0.03072568147933337921232,
    -0.06763282906132997367564,
    0.0002509471148314519575872,
    0.02236166212367909720537,
    -0.004723204757751397277926,
    -0.004281503682463429834497,
    0.001847646883056226476619,
    0.0002303857635231959672052,
    -0.000251963188942710136975,
    0.00003934732031627159948069,
];

const DB10: [f64; 20] = [
    0.02667005790055555358662,
    0.1881768000776914890209,
    0.5272011889317255864817,
    0.6884590394536035657419,
    0.2811723436605774607487,
    -0.2498464243273153794161,
    -0.1959462743773770435043,
    0.1273693403357932600827,
    0.09305736460357235116035,
    -0.07139414716639708714534,
    -0.02945753682187581285828,
    0.03321267405934100173976,
    0.003606553566956169655423,
    -0.01073317548333057504432,
    0.001395351747052901165789,
    0.001992405295185056117159,
    -0.0006858566949597116265614,
    -0.0001164668551292854509515,
    0.00009358867032006959133405,
    -0.00001326420289452124481244,
];

pub const NAMES: [&str; 10] = [
    "haar", "db2", "db3", "db4", "db5", "db6", "db7", "db8", "db9", "db10",
];

/// Scaling filter by name (`haar`, `db1`, ..., `db10`), checked on load.
pub fn daubechies(name: &str) -> Result<Vec<f64>> {
    let h: &[f64] = match name {
        "haar" | "db1" => &DB1,
        "db2" => &DB2,
        "db3" => &DB3,
        "db4" => &DB4,
        "db5" => &DB5,
        "db6" => &DB6,
        "db7" => &DB7,
        "db8" => &DB8,
        "db9" => &DB9,
        "db10" => &DB10,
        _ => {
            return Err(LabError::Config(format!(
                "unknown wavelet {name:?}; expected one of {}",
                NAMES.join(", ")
            )))
        }
    };
    check_qmf(h)?;
    Ok(h.to_vec())
}

/// `Σ h = √2` and `Σ_k h_k h_{k+2m} = δ_{m0}`.
pub fn check_qmf(h: &[f64]) -> Result<()> {
    if h.len() < 2 || h.len() % 2 != 0 {
        return Err(LabError::invariant(
            "wavelets",
            format!("filter length {} is not even", h.len()),
        ));
    }
    let sum: f64 = h.iter().sum();
    if (sum - std::f64::consts::SQRT_2).abs() > 1e-12 {
        return Err(LabError::invariant(
            "wavelets",
            format!("filter sum {sum} differs from sqrt(2)"),
        ));
    }
    for m in 0..h.len() / 2 {
        let s: f64 = (0..h.len() - 2 * m).map(|k| h[k] * h[k + 2 * m]).sum();
        let target = if m == 0 { 1.0 } else { 0.0 };
        if (s - target).abs() > 1e-10 {
            return Err(LabError::invariant(
                "wavelets",
                format!("shift orthonormality fails at m = {m}: {s}"),
            ));
        }
    }
    Ok(())
}

/// Wavelet filter `g_k = (-1)^k h_{L-1-k}`.
pub fn highpass(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l)
        .map(|k| if k % 2 == 0 { h[l - 1 - k] } else { -h[l - 1 - k] })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_filters_pass_qmf() {
        for name in NAMES {
            let h = daubechies(name).unwrap();
            assert_eq!(h.len() % 2, 0);
        }
    }

    #[test]
    fn vanishing_moments_of_highpass() {
        // N vanishing moments: Σ k^m g_k = 0 for m < N.
        for (n, name) in NAMES.iter().enumerate() {
            let g = highpass(&daubechies(name).unwrap());
            for m in 0..=n as i32 {
                let s: f64 = g.iter().enumerate().map(|(k, v)| (k as f64).powi(m) * v).sum();
                let scale: f64 = g.iter().enumerate().map(|(k, v)| ((k as f64).powi(m) * v).abs()).sum();
                assert!(s.abs() < 1e-12 * scale.max(1.0), "{name}, m = {m}: {s}");
            }
        }
    }

    #[test]
    fn rejects_broken_filter() {
        assert!(check_qmf(&[0.5, 0.5]).is_err());
        assert!(check_qmf(&[1.0, 0.2, 0.2]).is_err());
        assert!(daubechies("db11").is_err());
    }
}
