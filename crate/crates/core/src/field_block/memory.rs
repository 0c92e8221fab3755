//! Host/device dual buffer with validity flags.
//!
//! The device side is a second allocation with an explicit copy step; the
//! transfer counter makes data movement observable.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MemorySpace {
    Host,
    Device,
}

impl MemorySpace {
    pub fn other(self) -> MemorySpace {
        match self {
            MemorySpace::Host => MemorySpace::Device,
            MemorySpace::Device => MemorySpace::Host,
        }
    }
}

impl fmt::Display for MemorySpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MemorySpace::Host => "host",
            MemorySpace::Device => "device",
        })
    }
}

impl FromStr for MemorySpace {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "host" => Ok(MemorySpace::Host),
            "device" => Ok(MemorySpace::Device),
            o => Err(Error::UnknownSpace(o.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessQualifier {
    ReadOnly,
    WriteOnly,
    ReadWrite,
}

/// Handle returned by [`MemoryRegion::access`].
#[derive(Debug)]
pub enum Access<'a> {
    Read(&'a [f64]),
    Write(&'a mut [f64]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MemoryRegion {
    len: usize,
    host: Option<Vec<f64>>,
    device: Option<Vec<f64>>,
    host_valid: bool,
    device_valid: bool,
    initialised: bool,
    transfers: usize,
}

impl MemoryRegion {
    pub fn new(len: usize) -> Self {
        MemoryRegion {
            len,
            host: None,
            device: None,
            host_valid: false,
            device_valid: false,
            initialised: false,
            transfers: 0,
        }
    }

    /// A region written once on the host with `data`.
    pub fn from_host(data: Vec<f64>) -> Self {
        let mut r = MemoryRegion::new(data.len());
        r.write_only(MemorySpace::Host).copy_from_slice(&data);
        r
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn transfers(&self) -> usize {
        self.transfers
    }

    pub fn is_initialised(&self) -> bool {
        self.initialised
    }

    pub fn is_valid(&self, space: MemorySpace) -> bool {
        match space {
            MemorySpace::Host => self.host_valid,
            MemorySpace::Device => self.device_valid,
        }
    }

    pub fn is_allocated(&self, space: MemorySpace) -> bool {
        self.buf(space).is_some()
    }

    fn buf(&self, space: MemorySpace) -> &Option<Vec<f64>> {
        match space {
            MemorySpace::Host => &self.host,
            MemorySpace::Device => &self.device,
        }
    }

    fn buf_mut(&mut self, space: MemorySpace) -> &mut Option<Vec<f64>> {
        match space {
            MemorySpace::Host => &mut self.host,
            MemorySpace::Device => &mut self.device,
        }
    }

    fn set_valid(&mut self, space: MemorySpace, v: bool) {
        match space {
            MemorySpace::Host => self.host_valid = v,
            MemorySpace::Device => self.device_valid = v,
        }
    }

    fn ensure_allocated(&mut self, space: MemorySpace) {
        let len = self.len;
        self.buf_mut(space).get_or_insert_with(|| vec![0.0; len]);
    }

    // Make `space` current, copying from the other side if needed.
    fn make_current(&mut self, space: MemorySpace) -> Result<()> {
        if !self.initialised {
            return Err(Error::NotInitialised);
        }
        if !self.is_valid(space) {
            self.ensure_allocated(space);
            let src = self.buf(space.other()).clone().expect("valid space is allocated");
            self.buf_mut(space).as_mut().unwrap().copy_from_slice(&src);
            self.transfers += 1;
            self.set_valid(space, true);
        }
        Ok(())
    }

    pub fn read(&mut self, space: MemorySpace) -> Result<&[f64]> {
        self.make_current(space)?;
        Ok(self.buf(space).as_deref().unwrap())
    }

    /// Never transfers; contents are whatever the buffer last held
    /// (zeros on first allocation).
    pub fn write_only(&mut self, space: MemorySpace) -> &mut [f64] {
        self.ensure_allocated(space);
        self.initialised = true;
        self.set_valid(space, true);
        self.set_valid(space.other(), false);
        self.buf_mut(space).as_deref_mut().unwrap()
    }

    pub fn read_write(&mut self, space: MemorySpace) -> Result<&mut [f64]> {
        self.make_current(space)?;
        self.set_valid(space.other(), false);
        Ok(self.buf_mut(space).as_deref_mut().unwrap())
    }

    pub fn access(&mut self, space: MemorySpace, q: AccessQualifier) -> Result<Access<'_>> {
        Ok(match q {
            AccessQualifier::ReadOnly => Access::Read(self.read(space)?),
            AccessQualifier::WriteOnly => Access::Write(self.write_only(space)),
            AccessQualifier::ReadWrite => Access::Write(self.read_write(space)?),
        })
    }

    /// Host contents without touching flags, if the host copy is valid.
    pub fn host_view(&self) -> Option<&[f64]> {
        if self.host_valid {
            self.host.as_deref()
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use AccessQualifier::*;
    use MemorySpace::*;

    #[test]
    fn fresh_read_is_an_error() {
        let mut r = MemoryRegion::new(4);
        assert_eq!(r.read(Host).unwrap_err(), Error::NotInitialised);
        assert_eq!(r.read_write(Device).unwrap_err(), Error::NotInitialised);
        assert_eq!(r.transfers(), 0);
    }

    #[test]
    fn write_host_read_device_twice() {
        let mut r = MemoryRegion::new(3);
        r.write_only(Host).copy_from_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(r.read(Device).unwrap(), &[1.0, 2.0, 3.0]);
        assert_eq!(r.transfers(), 1);
        assert!(r.is_valid(Host) && r.is_valid(Device));
        r.read(Device).unwrap();
        assert_eq!(r.transfers(), 1);
    }

    #[test]
    fn lazy_allocation() {
        let mut r = MemoryRegion::new(2);
        assert!(!r.is_allocated(Host) && !r.is_allocated(Device));
        r.write_only(Device);
        assert!(r.is_allocated(Device) && !r.is_allocated(Host));
    }

    #[test]
    fn read_write_invalidates_other() {
        let mut r = MemoryRegion::from_host(vec![1.0, 2.0]);
        r.read_write(Device).unwrap()[0] = 5.0;
        assert!(!r.is_valid(Host));
        assert_eq!(r.read(Host).unwrap(), &[5.0, 2.0]);
        assert_eq!(r.transfers(), 2);
    }

    #[test]
    fn unknown_space() {
        assert_eq!("gpu".parse::<MemorySpace>(), Err(Error::UnknownSpace("gpu".into())));
        assert_eq!("Device".parse::<MemorySpace>(), Ok(Device));
    }

    #[test]
    fn access_dispatch() {
        let mut r = MemoryRegion::new(1);
        assert!(r.access(Host, ReadOnly).is_err());
        if let Access::Write(b) = r.access(Host, WriteOnly).unwrap() {
            b[0] = 7.0;
        }
        match r.access(Device, ReadOnly).unwrap() {
            Access::Read(b) => assert_eq!(b, &[7.0]),
            _ => panic!(),
        }
    }
}
