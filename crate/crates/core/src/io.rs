//! The form interchange format: a JSON document with the lattice shape, the
//! scalar mode and a sparse list of entries. Homogeneous forms carry their
//! degree; inhomogeneous forms omit it and may mix direction-set sizes.
//! Omitted entries are zero.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{Form, InhomogeneousForm};
use crate::lattice::{BoundaryMode, DirectionSet, Domain, MultiIndex};
use crate::scalar::Scalar;

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    dirs: Vec<usize>,
    k: [i64; 4],
    re: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct FormDoc {
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<u8>,
    extents: [usize; 4],
    boundary_mode: String,
    scalar: String,
    entries: Vec<EntryDoc>,
}

fn mode_name(mode: BoundaryMode) -> &'static str {
    match mode {
        BoundaryMode::ZeroPadded => "zero",
        BoundaryMode::Periodic => "periodic",
    }
}

pub fn parse_mode(name: &str) -> Result<BoundaryMode> {
    match name {
        "zero" | "zero_padded" => Ok(BoundaryMode::ZeroPadded),
        "periodic" => Ok(BoundaryMode::Periodic),
        other => Err(Error::FormFile(format!("unknown boundary mode `{other}`"))),
    }
}

fn entry<S: Scalar>(dirs: DirectionSet, site: MultiIndex, value: &S) -> EntryDoc {
    let (re, im) = value.to_re_im();
    EntryDoc {
        dirs: dirs.dirs_vec(),
        k: site.0,
        re,
        im: (im != 0.0).then_some(im),
    }
}

fn doc_value<S: Scalar>(e: &EntryDoc) -> Result<S> {
    S::from_re_im(e.re, e.im.unwrap_or(0.0)).ok_or_else(|| {
        Error::FormFile(format!(
            "entry ({:?}, {:?}) = {} + {}i not representable in `{}` mode",
            e.dirs,
            e.k,
            e.re,
            e.im.unwrap_or(0.0),
            S::scalar_tag()
        ))
    })
}

fn form_doc<S: Scalar>(form: &Form<S>) -> FormDoc {
    FormDoc {
        degree: Some(form.degree()),
        extents: form.domain().extents(),
        boundary_mode: mode_name(form.domain().mode()).into(),
        scalar: S::scalar_tag().into(),
        entries: form
            .iter_nonzero()
            .iter()
            .map(|(d, k, v)| entry(*d, *k, v))
            .collect(),
    }
}

fn inhom_doc<S: Scalar>(w: &InhomogeneousForm<S>) -> FormDoc {
    let mut entries = Vec::new();
    for r in 0..5 {
        entries.extend(
            w.part(r)
                .iter_nonzero()
                .iter()
                .map(|(d, k, v)| entry(*d, *k, v)),
        );
    }
    FormDoc {
        degree: None,
        extents: w.domain().extents(),
        boundary_mode: mode_name(w.domain().mode()).into(),
        scalar: S::scalar_tag().into(),
        entries,
    }
}

pub fn write_form<S: Scalar>(form: &Form<S>, out: &mut impl Write) -> Result<()> {
    let doc = form_doc(form);
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_inhomogeneous<S: Scalar>(
    w: &InhomogeneousForm<S>,
    out: &mut impl Write,
) -> Result<()> {
    let doc = inhom_doc(w);
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn save_form<S: Scalar>(form: &Form<S>, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_form(form, &mut file)
}

pub fn save_inhomogeneous<S: Scalar>(
    w: &InhomogeneousForm<S>,
    path: impl AsRef<Path>,
) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_inhomogeneous(w, &mut file)
}

fn read_doc(input: &mut impl BufRead) -> Result<FormDoc> {
    Ok(serde_json::from_reader(input)?)
}

fn doc_domain(doc: &FormDoc) -> Result<Domain> {
    Domain::new(doc.extents, parse_mode(&doc.boundary_mode)?)
}

/// Read a homogeneous form. The document must carry a degree and every entry
/// must match it.
pub fn read_form<S: Scalar>(input: &mut impl BufRead) -> Result<Form<S>> {
    let doc = read_doc(input)?;
    let degree = doc
        .degree
        .ok_or_else(|| Error::FormFile("document has no degree (inhomogeneous?)".into()))?;
    if degree > 4 {
        return Err(Error::FormFile(format!("degree {degree} out of range")));
    }
    let domain = doc_domain(&doc)?;
    let mut form = Form::zero(degree, domain);
    for e in &doc.entries {
        let dirs =
            DirectionSet::from_dirs(&e.dirs).map_err(|err| Error::FormFile(err.to_string()))?;
        if dirs.len() != degree as usize {
            return Err(Error::FormFile(format!(
                "entry dirs {:?} do not match degree {degree}",
                e.dirs
            )));
        }
        let site = MultiIndex(e.k);
        if domain.storage_index(site).is_none() {
            return Err(Error::FormFile(format!("site {:?} outside storage", e.k)));
        }
        form.set_coeff(dirs, site, doc_value(e)?);
    }
    Ok(form)
}

/// Read either kind of document as an inhomogeneous form (a homogeneous
/// document embeds as the single nonzero part).
pub fn read_inhomogeneous<S: Scalar>(input: &mut impl BufRead) -> Result<InhomogeneousForm<S>> {
    let doc = read_doc(input)?;
    let domain = doc_domain(&doc)?;
    let mut w = InhomogeneousForm::zero(domain);
    for e in &doc.entries {
        let dirs =
            DirectionSet::from_dirs(&e.dirs).map_err(|err| Error::FormFile(err.to_string()))?;
        if let Some(degree) = doc.degree {
            if dirs.len() != degree as usize {
                return Err(Error::FormFile(format!(
                    "entry dirs {:?} do not match degree {degree}",
                    e.dirs
                )));
            }
        }
        let site = MultiIndex(e.k);
        if domain.storage_index(site).is_none() {
            return Err(Error::FormFile(format!("site {:?} outside storage", e.k)));
        }
        w.set_coeff(dirs, site, doc_value(e)?);
    }
    Ok(w)
}

pub fn load_form<S: Scalar>(path: impl AsRef<Path>) -> Result<Form<S>> {
    let file = std::fs::File::open(path)?;
    read_form(&mut std::io::BufReader::new(file))
}

pub fn load_inhomogeneous<S: Scalar>(path: impl AsRef<Path>) -> Result<InhomogeneousForm<S>> {
    let file = std::fs::File::open(path)?;
    read_inhomogeneous(&mut std::io::BufReader::new(file))
}

/// Scalar tag stored in a form file, without loading the coefficients.
pub fn peek_scalar_tag(path: impl AsRef<Path>) -> Result<(String, Option<u8>)> {
    let file = std::fs::File::open(path)?;
    let doc: FormDoc = serde_json::from_reader(std::io::BufReader::new(file))?;
    Ok((doc.scalar, doc.degree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::ValueSet;
    use crate::Complex64;

    fn dom() -> Domain {
        Domain::new([2, 2, 2, 2], BoundaryMode::ZeroPadded).unwrap()
    }

    #[test]
    fn form_round_trips_through_json() {
        let f: Form<f64> = Form::random(2, dom(), 6000, ValueSet::UniformReals);
        let mut buf = Vec::new();
        write_form(&f, &mut buf).unwrap();
        let back: Form<f64> = read_form(&mut std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn inhomogeneous_round_trips_with_complex_entries() {
        let w: InhomogeneousForm<Complex64> =
            InhomogeneousForm::random(dom(), 6100, ValueSet::UniformReals);
        let mut buf = Vec::new();
        write_inhomogeneous(&w, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"scalar\": \"complex\""));
        assert!(text.contains("\"im\""));
        let back: InhomogeneousForm<Complex64> =
            read_inhomogeneous(&mut std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn integer_reader_rejects_fractional_entries() {
        let f: Form<f64> = Form::random(1, dom(), 6200, ValueSet::UniformReals);
        let mut buf = Vec::new();
        write_form(&f, &mut buf).unwrap();
        let result: Result<Form<i64>> = read_form(&mut std::io::BufReader::new(&buf[..]));
        assert!(result.is_err());
    }

    #[test]
    fn homogeneous_document_reads_as_inhomogeneous() {
        let f: Form<i64> = Form::random(3, dom(), 6300, ValueSet::SmallIntegers);
        let mut buf = Vec::new();
        write_form(&f, &mut buf).unwrap();
        let w: InhomogeneousForm<i64> =
            read_inhomogeneous(&mut std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(*w.part(3), f);
        assert!(w.part(0).is_zero());
    }

    #[test]
    fn malformed_documents_are_rejected() {
        let bad = br#"{"degree": 9, "extents": [2,2,2,2], "boundary_mode": "zero", "scalar": "real", "entries": []}"#;
        assert!(read_form::<f64>(&mut std::io::BufReader::new(&bad[..])).is_err());
        let bad_dirs = br#"{"degree": 1, "extents": [2,2,2,2], "boundary_mode": "zero", "scalar": "real", "entries": [{"dirs": [0,1], "k": [1,1,1,1], "re": 1.0}]}"#;
        assert!(read_form::<f64>(&mut std::io::BufReader::new(&bad_dirs[..])).is_err());
        let bad_mode = br#"{"degree": 1, "extents": [2,2,2,2], "boundary_mode": "open", "scalar": "real", "entries": []}"#;
        assert!(read_form::<f64>(&mut std::io::BufReader::new(&bad_mode[..])).is_err());
    }
}
