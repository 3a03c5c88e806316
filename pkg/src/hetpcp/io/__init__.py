"""결과 파일 입출력 — CSV, 실행 매니페스트, 플롯 스크립트."""
