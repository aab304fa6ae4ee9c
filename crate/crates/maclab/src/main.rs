fn main() { println!("maclab"); }
