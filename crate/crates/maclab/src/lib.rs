// lib under construction
